#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "phlab/error.hpp"
#include "phlab/skew.hpp"

namespace phlab::skew {

namespace {
constexpr double kTwoPi = 2 * std::numbers::pi;
}

KanFamilyParams KanFamilyParams::standard(std::size_t d, double epsilon) {
  KanFamilyParams p;
  p.epsilon = epsilon;
  TrigTerm t;
  t.k.assign(d, 0);
  t.k[0] = 1;
  t.c = 1;
  p.psi.push_back(t);
  return p;
}

double KanFamilyParams::coefficient_sum() const {
  double s = 0;
  for (const auto& t : psi) s += std::abs(t.c) + std::abs(t.s);
  return s;
}

double flow(double s, double tau) {
  if (tau == 0) return s;
  const double a = std::exp(-tau), oma = -std::expm1(-tau);
  return s * a / (1 - s * oma);
}

double flow_derivative(double s, double tau) {
  if (tau == 0) return 1;
  const double a = std::exp(-tau), den = 1 - s * -std::expm1(-tau);
  return a / (den * den);
}

namespace {
double flow_log_derivative(double s, double tau) {
  if (tau == 0) return 0;
  return -tau - 2 * std::log1p(s * std::expm1(-tau));
}
}  // namespace

FiberFamily FiberFamily::kan(KanFamilyParams p) {
  require(p.epsilon >= 0 && p.epsilon < 1, ErrorCode::PreconditionViolated, "Kan epsilon must lie in [0, 1)");
  require(!p.psi.empty(), ErrorCode::PreconditionViolated, "psi has no terms");
  const std::size_t d = p.psi.front().k.size();
  for (const auto& t : p.psi)
    require(t.k.size() == d && d > 0, ErrorCode::PreconditionViolated, "psi frequency vectors differ in length");
  const double s = p.coefficient_sum();
  if (s > 1)
    for (auto& t : p.psi) t.c /= s, t.s /= s;
  FiberFamily f;
  f.kan_ = std::move(p);
  f.name_ = "kan";
  return f;
}

FiberFamily FiberFamily::custom(std::string name, Fn phi, Fn dphi, Fn inverse) {
  FiberFamily f;
  f.name_ = std::move(name);
  f.phi_ = std::move(phi);
  f.dphi_ = std::move(dphi);
  f.inv_ = std::move(inverse);
  return f;
}

const KanFamilyParams& FiberFamily::kan_params() const {
  require(kan_.has_value(), ErrorCode::PreconditionViolated, "not a Kan family");
  return *kan_;
}

double FiberFamily::psi(Point x) const {
  const auto& p = kan_params();
  double v = 0;
  for (const auto& t : p.psi) {
    double arg = 0;
    for (std::size_t i = 0; i < t.k.size(); ++i) arg += t.k[i] * x[i];
    arg = kTwoPi * arg;
    if (t.c != 0) v += t.c * std::cos(arg);
    if (t.s != 0) v += t.s * std::sin(arg);
  }
  return v;
}

double FiberFamily::base(Point x, double t) const {
  if (kan_) return t * (1 + kan_->epsilon * psi(x) * (1 - t));
  return phi_(x, t);
}

double FiberFamily::base_log_dt(Point x, double t) const {
  if (kan_) return std::log1p(kan_->epsilon * psi(x) * (1 - 2 * t));
  return std::log(dphi_(x, t));
}

double FiberFamily::base_inverse(Point x, double u) const {
  if (kan_) {
    const double c = kan_->epsilon * psi(x);
    if (c == 0) return u;
    const double b = 1 + c;
    return 2 * u / (b + std::sqrt(std::max(0.0, b * b - 4 * c * u)));
  }
  if (inv_) return inv_(x, u);
  double lo = 0, hi = 1;
  for (int i = 0; i < 200 && hi - lo > 1e-17; ++i) {
    const double mid = 0.5 * (lo + hi);
    (phi_(x, mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double FiberFamily::operator()(Point x, double t) const { return flow(base(x, t), tau_); }

double FiberFamily::dt(Point x, double t) const { return std::exp(log_dt(x, t)); }

double FiberFamily::log_dt(Point x, double t) const {
  const double l = base_log_dt(x, t);
  if (tau_ == 0) return l;
  return flow_log_derivative(base(x, t), tau_) + l;
}

double FiberFamily::inverse(Point x, double u) const { return base_inverse(x, flow(u, -tau_)); }

FiberFamily FiberFamily::with_flow(double tau) const {
  FiberFamily g = *this;
  g.tau_ += tau;
  return g;
}

std::string FiberFamily::descriptor() const {
  std::ostringstream os;
  os.precision(17);
  if (kan_) {
    os << "kan(epsilon=" << kan_->epsilon << ", psi=";
    for (std::size_t i = 0; i < kan_->psi.size(); ++i) {
      const auto& t = kan_->psi[i];
      if (i) os << " + ";
      os << "[k=(";
      for (std::size_t j = 0; j < t.k.size(); ++j) os << (j ? "," : "") << t.k[j];
      os << ") c=" << t.c << " s=" << t.s << "]";
    }
    os << ")";
  } else {
    os << name_;
  }
  if (tau_ != 0) os << " o flow(tau=" << tau_ << ")";
  return os.str();
}

HolderEstimate holder_estimate(const FiberFamily& f, std::size_t d) {
  HolderEstimate h;
  if (f.is_kan()) {
    const auto& p = f.kan_params();
    double grad = 0;
    for (const auto& t : p.psi) {
      double kn = 0;
      for (int k : t.k) kn += double(k) * k;
      grad += (std::abs(t.c) + std::abs(t.s)) * std::sqrt(kn);
    }
    grad *= kTwoPi;
    const double c = p.epsilon * grad / (1 - p.epsilon);
    h.C_phi = std::max(1.0, c);
    return h;
  }
  std::uint64_t state = 0x9e3779b97f4a7c15ULL;
  double worst = 0;
  std::vector<double> x(d), y(d);
  for (int i = 0; i < 4000; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = uniform01(state);
      y[j] = x[j] + 0.02 * (uniform01(state) - 0.5);
    }
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), d), yv(y.data(), d);
    const double dist = torus::torus_distance(xv, yv);
    if (dist <= 0) continue;
    for (double b : {0.0, 1.0}) worst = std::max(worst, std::abs(f.log_dt(x, b) - f.log_dt(y, b)) / dist);
  }
  h.C_phi = std::max(1.0, 1.5 * worst);
  return h;
}

double holder_sample_ratio(const FiberFamily& f, std::size_t d, const HolderEstimate& h, int pairs,
                           std::uint64_t seed) {
  std::uint64_t state = seed;
  double worst = 0;
  std::vector<double> x(d), y(d);
  for (int i = 0; i < pairs; ++i) {
    const double scale = std::pow(10.0, -4 * uniform01(state));
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = uniform01(state);
      y[j] = x[j] + scale * (uniform01(state) - 0.5);
    }
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), d), yv(y.data(), d);
    const double dist = torus::torus_distance(xv, yv);
    if (dist <= 0) continue;
    for (double b : {0.0, 1.0})
      worst = std::max(worst, std::abs(f.log_dt(x, b) - f.log_dt(y, b)) / (h.C_phi * std::pow(dist, h.theta)));
  }
  return worst;
}

}  // namespace phlab::skew
