#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <sstream>

#include "phlab/error.hpp"
#include "phlab/skew.hpp"

namespace phlab::skew {

namespace {

using Real = boost::multiprecision::mpfr_float;

Real to_real(const Rational& q) { return Real(q.get_num().get_str()) / Real(q.get_den().get_str()); }

class PreciseKan {
 public:
  PreciseKan(const SkewProduct& F, const PeriodicOrbit& p, long M) : period_(long(p.period())) {
    const auto rows = F.base().matrix().to_rows();
    const long long a = rows[0][0], b = rows[0][1], c = rows[1][0], d = rows[1][1];
    const Real tr = Real(a + d), det = Real(a * d - b * c);
    const Real disc = sqrt(tr * tr - 4 * det);
    Real r1 = (tr + disc) / 2, r2 = (tr - disc) / 2;
    if (abs(r1) < abs(r2)) std::swap(r1, r2);
    mu_u_ = r1;
    mu_s_ = r2;
    auto eigvec = [&](const Real& mu) {
      std::array<Real, 2> v;
      if (b != 0)
        v = {Real(b), mu - Real(a)};
      else
        v = {mu - Real(d), Real(c)};
      const Real n = sqrt(v[0] * v[0] + v[1] * v[1]);
      v[0] /= n;
      v[1] /= n;
      return v;
    };
    eu_ = eigvec(mu_u_);
    es_ = eigvec(mu_s_);
    for (const auto& pt : p.points) {
      const auto& q = pt.rational();
      P_.push_back({to_real(q[0]), to_real(q[1])});
    }
    const auto& kp = F.fiber().kan_params();
    eps_ = Real(kp.epsilon);
    for (const auto& t : kp.psi) terms_.push_back({Real(t.k[0]), Real(t.k[1]), Real(t.c), Real(t.s)});
    tau_ = Real(F.fiber().flow_tau());
    a_ = exp(-tau_);
    two_pi_ = 2 * boost::math::constants::pi<Real>();
    pow_s_.resize(2 * M + 1);
    pow_u_.resize(2 * M + 1);
    pow_s_[M] = pow_u_[M] = Real(1);
    for (long j = 1; j <= M; ++j) {
      pow_s_[M + j] = pow_s_[M + j - 1] * mu_s_;
      pow_u_[M + j] = pow_u_[M + j - 1] * mu_u_;
      pow_s_[M - j] = pow_s_[M - j + 1] / mu_s_;
      pow_u_[M - j] = pow_u_[M - j + 1] / mu_u_;
    }
    M_ = M;
  }

  // phi at the base point P[k] + al mu_s^j e_s + be mu_u^j e_u
  Real phi(long k, long j, const Real& al, const Real& be, const Real& t) const {
    const Real c = eps_ * psi(k + j, al * pow_s_[M_ + j], be * pow_u_[M_ + j]);
    return flow(t * (1 + c * (1 - t)), a_);
  }
  Real phi_inv(long k, long j, const Real& al, const Real& be, const Real& v) const {
    const Real c = eps_ * psi(k + j, al * pow_s_[M_ + j], be * pow_u_[M_ + j]);
    const Real u = flow(v, 1 / a_);
    if (c == 0) return u;
    const Real bb = 1 + c;
    return 2 * u / (bb + sqrt(bb * bb - 4 * c * u));
  }

  // stable holonomy between (k, al1, be) and (k, al2, be)
  Real hol_s(long k, const Real& al1, const Real& al2, const Real& be, Real t) const {
    for (long j = 0; j < M_; ++j) t = phi(k, j, al1, be, t);
    for (long j = M_ - 1; j >= 0; --j) t = phi_inv(k, j, al2, be, t);
    return t;
  }
  // unstable holonomy between (k, al, be1) and (k, al, be2)
  Real hol_u(long k, const Real& al, const Real& be1, const Real& be2, Real t) const {
    for (long j = 1; j <= M_; ++j) t = phi_inv(k, -j, al, be1, t);
    for (long j = M_; j >= 1; --j) t = phi(k, -j, al, be2, t);
    return t;
  }

  const Real& mu_s() const { return mu_s_; }
  const Real& mu_u() const { return mu_u_; }

 private:
  long period_, M_ = 0;
  Real mu_s_, mu_u_, eps_, tau_, a_, two_pi_;
  std::array<Real, 2> es_, eu_;
  std::vector<std::array<Real, 2>> P_;
  std::vector<std::array<Real, 4>> terms_;
  std::vector<Real> pow_s_, pow_u_;

  static Real flow(const Real& s, const Real& a) {
    if (a == 1) return s;
    return s * a / (1 - s * (1 - a));
  }
  Real psi(long k, const Real& al, const Real& be) const {
    const auto& P = P_[((k % period_) + period_) % period_];
    const Real x0 = P[0] + al * es_[0] + be * eu_[0];
    const Real x1 = P[1] + al * es_[1] + be * eu_[1];
    Real v = 0;
    for (const auto& t : terms_) {
      const Real arg = two_pi_ * (t[0] * x0 + t[1] * x1);
      if (t[2] != 0) v += t[2] * cos(arg);
      if (t[3] != 0) v += t[3] * sin(arg);
    }
    return v;
  }
};

}  // namespace

TwistReport central_twist_decay(const SkewProduct& F, const PeriodicOrbit& p, double r_distance, long n_max,
                                long n_lo, double a0, double t0) {
  require(F.dimension() == 2, ErrorCode::PreconditionViolated, "central twist is implemented for d = 2");
  require(F.fiber().is_kan(), ErrorCode::PreconditionViolated, "central twist needs a Kan family");
  require(n_lo >= 0 && n_max > n_lo + 1, ErrorCode::PreconditionViolated, "fit window");
  const auto bs = birkhoff_sum(F, p, 0);
  require(bs.S <= 0, ErrorCode::PreconditionViolated, "orbit must have nonpositive central exponent on M_0");

  const auto& sp = F.base().splitting();
  const double per = double(p.period());
  TwistReport rep;
  rep.n_lo = n_lo;
  rep.n_hi = n_max;
  rep.lambda_s = per * sp.rate_s;
  rep.lambda_u = per * sp.rate_u;
  rep.lambda_c = bs.S;
  rep.lambda_p = (rep.lambda_u - rep.lambda_c) / (rep.lambda_u - rep.lambda_s) * rep.lambda_s;

  const double ln_mu = sp.rate_u;
  const long M = long(std::ceil(90 * std::log(10.0) / std::min(ln_mu, -sp.rate_s))) + 10;
  const double mag = std::log10(std::max(std::abs(a0), std::abs(r_distance))) + M * std::max(ln_mu, -sp.rate_s) / std::log(10.0);
  const unsigned digits = unsigned(std::max(0.0, mag)) + 110;
  const unsigned saved = Real::default_precision();
  Real::default_precision(digits);
  struct Restore {
    unsigned d;
    ~Restore() { Real::default_precision(d); }
  } restore{saved};

  PreciseKan K(F, p, M);
  const long per_l = long(p.period());
  const Real rho(r_distance), zero(0);
  Real alpha(a0), t(t0);
  const Real mu_s_return = pow(K.mu_s(), per_l);
  bool all_zero = true;
  for (long n = 0; n <= n_max; ++n) {
    if (n > 0) {
      for (long j = 0; j < per_l; ++j) t = K.phi(0, j, alpha, zero, t);
      alpha *= mu_s_return;
    }
    const Real y = K.hol_s(0, alpha, zero, zero, t);
    const Real w = K.hol_u(0, zero, zero, rho, y);
    const Real z = K.hol_u(0, alpha, zero, rho, t);
    const Real w2 = K.hol_s(0, alpha, zero, rho, z);
    const Real dn = abs(w2 - w);
    rep.d.push_back(dn.convert_to<double>());
    rep.ln_d.push_back(dn == 0 ? -INFINITY : log(dn).convert_to<double>());
    if (dn != 0) all_zero = false;
  }
  if (all_zero) {
    rep.twist_free = true;
    rep.slope = -INFINITY;
    rep.max_excess = -INFINITY;
    return rep;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = 0;
  rep.max_excess = -INFINITY;
  for (long n = n_lo; n <= n_max; ++n) {
    const double l = rep.ln_d[n];
    if (!std::isfinite(l)) {
      std::ostringstream os;
      os << "d_n vanished at n = " << n;
      throw Error(ErrorCode::DegenerateGeometry, os.str());
    }
    sx += n, sy += l, sxx += double(n) * n, sxy += n * l, cnt += 1;
    rep.max_excess = std::max(rep.max_excess, l - n * rep.lambda_p);
  }
  rep.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  return rep;
}

}  // namespace phlab::skew
