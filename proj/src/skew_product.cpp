#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>

#include "phlab/error.hpp"
#include "phlab/skew.hpp"

namespace phlab::skew {

DominationMargins check_domination(const ToralAutomorphism& A, const FiberFamily& f, int res) {
  require(res >= 1, ErrorCode::PreconditionViolated, "grid resolution must be positive");
  const std::size_t d = A.dimension();
  if (f.is_kan())
    require(f.kan_params().psi.front().k.size() == d, ErrorCode::PreconditionViolated,
            "psi dimension does not match the base");
  const int nb = std::max(64, res);
  const auto& sp = A.splitting();
  const double ns = sp.norm_s(), mu = sp.conorm_u();
  DominationMargins m;
  m.inf_dt = INFINITY;
  m.sup_dt = -INFINITY;
  std::vector<double> x(d), xmin(d), xmax(d);
  double tmin = 0, tmax = 0;
  std::vector<int> idx(d, 0);
  for (;;) {
    for (std::size_t i = 0; i < d; ++i) x[i] = double(idx[i]) / nb;
    for (int j = 0; j <= res; ++j) {
      const double t = double(j) / res, v = f.dt(x, t);
      if (v < m.inf_dt) m.inf_dt = v, xmin = x, tmin = t;
      if (v > m.sup_dt) m.sup_dt = v, xmax = x, tmax = t;
      ++m.grid_points;
    }
    std::size_t i = 0;
    while (i < d && ++idx[i] == nb) idx[i++] = 0;
    if (i == d) break;
  }
  m.stable = m.inf_dt - ns;
  m.unstable = mu - m.sup_dt;
  m.center_bunched = ns < 1 && mu > 1;
  auto where = [](const std::vector<double>& p, double t) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
    os << "; t=" << t << ")";
    return os.str();
  };
  if (!(m.stable > 0)) {
    std::ostringstream os;
    os << "dphi/dt = " << m.inf_dt << " <= ||A|Ls|| = " << ns << " at " << where(xmin, tmin);
    throw Error(ErrorCode::DominationViolated, os.str());
  }
  if (!(m.unstable > 0)) {
    std::ostringstream os;
    os << "dphi/dt = " << m.sup_dt << " >= m(A|Lu) = " << mu << " at " << where(xmax, tmax);
    throw Error(ErrorCode::DominationViolated, os.str());
  }
  require(m.center_bunched, ErrorCode::DominationViolated, "center bunching fails");
  return m;
}

SkewProduct::SkewProduct(ToralAutomorphism base, FiberFamily fiber)
    : base_(std::move(base)), fiber_(std::move(fiber)) {
  margins_ = check_domination(base_, fiber_);
}

void SkewProduct::step(Eigen::VectorXd& x, double& t) const {
  t = fiber_(std::span<const double>(x.data(), x.size()), t);
  x = torus::reduce_mod1(base_.matrix_d() * x);
}

std::pair<Eigen::VectorXd, double> SkewProduct::apply(const Eigen::VectorXd& x, double t) const {
  Eigen::VectorXd y = x;
  double s = t;
  step(y, s);
  return {y, s};
}

double stable_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double s = 0, c = 0;
  for (double v : terms) {
    const double u = s + v;
    if (std::abs(s) >= std::abs(v))
      c += (s - u) + v;
    else
      c += (v - u) + s;
    s = u;
  }
  return s + c;
}

BirkhoffSum birkhoff_sum(const SkewProduct& F, const PeriodicOrbit& orbit, int boundary) {
  require(boundary == 0 || boundary == 1, ErrorCode::PreconditionViolated, "boundary must be 0 or 1");
  require(orbit.period() > 0, ErrorCode::PreconditionViolated, "empty orbit");
  std::vector<double> terms;
  terms.reserve(orbit.period());
  for (const auto& p : orbit.points) {
    const auto c = p.coords();
    terms.push_back(F.fiber().log_dt(c, boundary));
  }
  BirkhoffSum b;
  b.S = stable_sum(std::move(terms));
  b.period = orbit.period();
  b.lambda_c = b.S / double(b.period);
  return b;
}

std::vector<BoundaryExponent> periodic_exponents(const SkewProduct& F, int boundary, unsigned period_cap) {
  std::vector<BoundaryExponent> out;
  for (auto& o : torus::periodic_orbits_up_to(F.base(), period_cap)) {
    BoundaryExponent e;
    e.sum = birkhoff_sum(F, o, boundary);
    e.orbit = std::move(o);
    e.boundary = boundary;
    out.push_back(std::move(e));
  }
  return out;
}

namespace {
double trapezoid(const SkewProduct& F, int boundary, int n, double& absmax) {
  const std::size_t d = F.dimension();
  std::vector<int> idx(d, 0);
  std::vector<double> x(d), terms;
  for (;;) {
    for (std::size_t i = 0; i < d; ++i) x[i] = double(idx[i]) / n;
    const double v = F.fiber().log_dt(x, boundary);
    absmax = std::max(absmax, std::abs(v));
    terms.push_back(v);
    std::size_t i = 0;
    while (i < d && ++idx[i] == n) idx[i++] = 0;
    if (i == d) break;
  }
  const double cnt = double(terms.size());
  return stable_sum(std::move(terms)) / cnt;
}
}  // namespace

QuadratureResult boundary_exponent_integral(const SkewProduct& F, int boundary, int res) {
  require(boundary == 0 || boundary == 1, ErrorCode::PreconditionViolated, "boundary must be 0 or 1");
  require(res >= 2, ErrorCode::PreconditionViolated, "resolution too small");
  double absmax = 0;
  const double q1 = trapezoid(F, boundary, res, absmax);
  const double q2 = trapezoid(F, boundary, 2 * res, absmax);
  QuadratureResult r;
  r.value = q2;
  r.error = std::abs(q2 - q1) + 64 * DBL_EPSILON * absmax;
  r.resolution = 2 * res;
  r.sign = std::abs(r.value) <= r.error ? 0 : (r.value < 0 ? -1 : 1);
  return r;
}

QuadratureResult mostly_contracting_check(const SkewProduct& F, int boundary, int res) {
  auto r = boundary_exponent_integral(F, boundary, res);
  if (r.sign == 0) {
    std::ostringstream os;
    os.precision(3);
    os << "integral " << r.value << " within error estimate " << r.error << " on boundary " << boundary;
    throw Error(ErrorCode::InconclusiveSign, os.str());
  }
  return r;
}

PerturbResult perturb_flow(const SkewProduct& F, double tau, const std::vector<PeriodicOrbit>& tested) {
  require(tau >= 0, ErrorCode::PreconditionViolated, "tau must be nonnegative");
  PerturbResult r{SkewProduct(F.base(), F.fiber().with_flow(tau)), {}, std::exp(-tau)};
  auto orbits = tested.empty() ? torus::periodic_orbits_up_to(F.base(), 3) : tested;
  for (const auto& o : orbits)
    for (int b : {0, 1}) {
      ExponentShift s;
      s.orbit = o;
      s.boundary = b;
      s.lambda_F = birkhoff_sum(F, o, b).lambda_c;
      s.lambda_G = birkhoff_sum(r.G, o, b).lambda_c;
      r.shifts.push_back(std::move(s));
    }
  return r;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) { return double(splitmix64(state) >> 11) * 0x1.0p-53; }

namespace {
constexpr std::uint64_t kMask = (std::uint64_t(1) << 62) - 1;
constexpr double kScale = 0x1.0p-62;
}  // namespace

LatticeOrbit::LatticeOrbit(const ToralAutomorphism& A, std::vector<std::uint64_t> start)
    : x_(std::move(start)), d_(A.dimension()) {
  require(x_.size() == d_, ErrorCode::PreconditionViolated, "lattice point dimension");
  const auto rows = A.matrix().to_rows();
  for (const auto& r : rows)
    for (long long v : r) a_.push_back(v);
  tmp_.resize(d_);
  xd_.resize(d_);
  for (auto& v : x_) v &= kMask;
  refresh();
}

LatticeOrbit LatticeOrbit::random(const ToralAutomorphism& A, std::uint64_t& state) {
  std::vector<std::uint64_t> x(A.dimension());
  for (auto& v : x) v = splitmix64(state) >> 2;
  return LatticeOrbit(A, std::move(x));
}

LatticeOrbit LatticeOrbit::from_point(const ToralAutomorphism& A, const Eigen::VectorXd& x) {
  std::vector<std::uint64_t> v(A.dimension());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double f = x[i] - std::floor(x[i]);
    v[i] = std::uint64_t(std::llround(std::ldexp(f, 62))) & kMask;
  }
  return LatticeOrbit(A, std::move(v));
}

void LatticeOrbit::step() {
  for (std::size_t i = 0; i < d_; ++i) {
    std::uint64_t s = 0;
    for (std::size_t j = 0; j < d_; ++j) s += std::uint64_t(a_[i * d_ + j]) * x_[j];
    tmp_[i] = s & kMask;
  }
  x_.swap(tmp_);
  refresh();
}

void LatticeOrbit::refresh() {
  for (std::size_t i = 0; i < d_; ++i) xd_[i] = double(x_[i]) * kScale;
}

BirkhoffAverageCheck corollary_average_check(const SkewProduct& F, int boundary, unsigned period_cap,
                                             std::size_t orbits, long iterations, std::uint64_t seed) {
  BirkhoffAverageCheck r;
  r.hypothesis = true;
  for (const auto& e : periodic_exponents(F, boundary, period_cap))
    if (e.sum.lambda_c > 0) r.hypothesis = false;
  r.orbits = orbits;
  r.iterations = iterations;
  r.max_average = -INFINITY;
  std::uint64_t state = seed;
  for (std::size_t k = 0; k < orbits; ++k) {
    auto o = LatticeOrbit::random(F.base(), state);
    double s = 0;
    for (long n = 0; n < iterations; ++n) {
      s += F.fiber().log_dt(o.coords(), boundary);
      o.step();
    }
    r.max_average = std::max(r.max_average, s / double(iterations));
  }
  return r;
}

}  // namespace phlab::skew
