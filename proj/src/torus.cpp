#include "phlab/torus.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>

#include "phlab/error.hpp"

namespace phlab::torus {

Eigen::VectorXd HyperbolicSplitting::power_eigen(const Eigen::VectorXd& xi, long k) const {
  Eigen::VectorXd out(xi.size());
  for (const auto& b : blocks) {
    if (b.size == 1) {
      out[b.start] = xi[b.start] * std::pow(b.lambda, static_cast<double>(k));
    } else {
      const double r = std::pow(b.modulus, static_cast<double>(k));
      const double c = std::cos(k * b.angle), s = std::sin(k * b.angle);
      const double u = xi[b.start], v = xi[b.start + 1];
      out[b.start] = r * (c * u + s * v);
      out[b.start + 1] = r * (-s * u + c * v);
    }
  }
  return out;
}

double HyperbolicSplitting::norm_s() const { return std::exp(rate_s); }
double HyperbolicSplitting::conorm_u() const { return std::exp(rate_u); }

ToralAutomorphism::ToralAutomorphism(IntMatrix m, HyperbolicSplitting split)
    : m_(std::move(m)), split_(std::move(split)) {
  inv_ = m_.unimodular_inverse();
  det_ = static_cast<int>(m_.det().get_si());
  const auto d = static_cast<Eigen::Index>(m_.rows());
  md_.resize(d, d);
  invd_.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      md_(i, j) = m_(i, j).get_d();
      invd_(i, j) = inv_(i, j).get_d();
    }
}

namespace {

HyperbolicSplitting compute_splitting(const Eigen::MatrixXd& a) {
  const Eigen::Index d = a.rows();
  Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  require(es.info() == Eigen::Success, ErrorCode::NotHyperbolic, "eigen decomposition failed");
  struct Raw {
    std::complex<double> lambda;
    Eigen::VectorXcd v;
  };
  std::vector<Raw> raw;
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto lam = es.eigenvalues()[i];
    if (std::abs(std::abs(lam) - 1.0) < kHyperbolicTol)
      throw Error(ErrorCode::NotHyperbolic, "eigenvalue modulus within tolerance of 1");
    if (lam.imag() < -1e-12 * std::max(1.0, std::abs(lam))) continue;
    raw.push_back({lam, es.eigenvectors().col(i)});
  }
  std::stable_sort(raw.begin(), raw.end(),
                   [](const Raw& x, const Raw& y) { return std::abs(x.lambda) < std::abs(y.lambda); });

  HyperbolicSplitting s;
  s.V.resize(d, d);
  s.rate_s = -std::numeric_limits<double>::infinity();
  s.rate_u = std::numeric_limits<double>::infinity();
  int col = 0;
  for (const auto& r : raw) {
    EigenBlock b;
    b.start = col;
    b.modulus = std::abs(r.lambda);
    b.stable = b.modulus < 1.0;
    const bool real = std::abs(r.lambda.imag()) <= 1e-12 * std::max(1.0, b.modulus);
    auto& basis = b.stable ? s.stable_basis : s.unstable_basis;
    if (real) {
      b.size = 1;
      b.lambda = r.lambda.real();
      Eigen::VectorXd v = r.v.real();
      if (v.norm() < 1e-8) v = r.v.imag();
      v.normalize();
      s.V.col(col) = v;
      basis.push_back(v);
    } else {
      b.size = 2;
      b.angle = std::arg(r.lambda);
      Eigen::VectorXcd v = r.v / r.v.norm();
      s.V.col(col) = v.real();
      s.V.col(col + 1) = v.imag();
      basis.push_back(v.real().normalized());
      basis.push_back(v.imag().normalized());
    }
    (b.stable ? s.dim_s : s.dim_u) += b.size;
    if (b.stable)
      s.rate_s = std::max(s.rate_s, std::log(b.modulus));
    else
      s.rate_u = std::min(s.rate_u, std::log(b.modulus));
    col += b.size;
    s.blocks.push_back(b);
  }
  if (s.dim_s == 0 || s.dim_u == 0)
    throw Error(ErrorCode::NotHyperbolic, "splitting lacks a stable or unstable direction");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s.V);
  const auto sv = svd.singularValues();
  require(sv[d - 1] > 1e-10 * sv[0], ErrorCode::NotHyperbolic, "defective eigenbasis");
  s.kappa = sv[0] / sv[d - 1];
  s.V_inv = s.V.inverse();
  s.Lambda = s.V_inv * a * s.V;
  return s;
}

}  // namespace

ToralAutomorphism validate_automorphism(const IntMatrix& m) {
  require(m.square() && m.rows() > 0, ErrorCode::PreconditionViolated, "matrix must be square");
  const Integer det = m.det();
  if (abs(det) != 1) throw Error(ErrorCode::NotUnimodular, "|det| = " + Integer(abs(det)).get_str());
  const auto I = IntMatrix::identity(m.rows());
  if ((m - I).det() == 0 || (m - (I - I - I)).det() == 0)
    throw Error(ErrorCode::NotHyperbolic, "eigenvalue +1 or -1");
  const auto d = static_cast<Eigen::Index>(m.rows());
  Eigen::MatrixXd a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = m(i, j).get_d();
  return ToralAutomorphism(m, compute_splitting(a));
}

ToralAutomorphism validate_automorphism(const std::vector<std::vector<long long>>& rows) {
  return validate_automorphism(IntMatrix::from_rows(rows));
}

TorusPoint TorusPoint::exact(RatVec coords) {
  TorusPoint p;
  p.exact_ = true;
  for (auto& c : coords) {
    c = frac(c);
    if (mpz_sizeinbase(c.get_den_mpz_t(), 2) > max_denominator_bits)
      throw Error(ErrorCode::OverflowBudget, "denominator exceeds configured limit");
  }
  p.q_ = std::move(coords);
  return p;
}

TorusPoint TorusPoint::numeric(std::vector<double> coords) {
  TorusPoint p;
  for (auto& c : coords) {
    c -= std::floor(c);
    if (c >= 1.0) c = 0.0;
  }
  p.x_ = std::move(coords);
  return p;
}

TorusPoint TorusPoint::numeric(const Eigen::VectorXd& coords) {
  return numeric(std::vector<double>(coords.data(), coords.data() + coords.size()));
}

const RatVec& TorusPoint::rational() const {
  require(exact_, ErrorCode::PreconditionViolated, "point is not exact");
  return q_;
}

std::vector<double> TorusPoint::coords() const {
  if (!exact_) return x_;
  std::vector<double> r;
  for (const auto& c : q_) r.push_back(c.get_d());
  return r;
}

Eigen::VectorXd TorusPoint::vec() const {
  auto c = coords();
  return Eigen::Map<Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
}

std::string TorusPoint::to_string() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < dimension(); ++i) {
    if (i) os << ",";
    if (exact_)
      os << phlab::to_string(q_[i]);
    else
      os << x_[i];
  }
  os << ")";
  return os.str();
}

bool TorusPoint::operator==(const TorusPoint& o) const {
  if (exact_ != o.exact_) return false;
  return exact_ ? q_ == o.q_ : x_ == o.x_;
}

bool TorusPoint::operator<(const TorusPoint& o) const {
  if (exact_ && o.exact_) return q_ < o.q_;
  return coords() < o.coords();
}

Eigen::VectorXd reduce_mod1(Eigen::VectorXd v) {
  for (auto& c : v) {
    c -= std::floor(c);
    if (c >= 1.0) c = 0.0;
  }
  return v;
}

double torus_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double s = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    d -= std::round(d);
    s += d * d;
  }
  return std::sqrt(s);
}

double torus_distance(const TorusPoint& a, const TorusPoint& b) {
  if (a.is_exact() && b.is_exact()) {
    double s = 0;
    for (std::size_t i = 0; i < a.dimension(); ++i) {
      Rational d = a.rational()[i] - b.rational()[i];
      d = frac(d);
      double x = d.get_d();
      x = std::min(x, 1.0 - x);
      s += x * x;
    }
    return std::sqrt(s);
  }
  return torus_distance(a.vec(), b.vec());
}

TorusPoint iterate(const ToralAutomorphism& A, const TorusPoint& x, long n) {
  const IntMatrix& m = n >= 0 ? A.matrix() : A.inverse();
  const long steps = n >= 0 ? n : -n;
  if (x.is_exact()) {
    RatVec v = x.rational();
    for (long i = 0; i < steps; ++i) {
      v = m.apply(v);
      for (auto& c : v) c = frac(c);
    }
    return TorusPoint::exact(std::move(v));
  }
  const Eigen::MatrixXd& md = n >= 0 ? A.matrix_d() : A.inverse_d();
  Eigen::VectorXd v = x.vec();
  for (long i = 0; i < steps; ++i) v = reduce_mod1(md * v);
  return TorusPoint::numeric(v);
}

RatVec iterate_lift(const ToralAutomorphism& A, RatVec lift, long n) {
  const IntMatrix& m = n >= 0 ? A.matrix() : A.inverse();
  for (long i = 0; i < std::labs(n); ++i) lift = m.apply(lift);
  return lift;
}

Eigen::VectorXd iterate_lift(const ToralAutomorphism& A, Eigen::VectorXd lift, long n) {
  const Eigen::MatrixXd& m = n >= 0 ? A.matrix_d() : A.inverse_d();
  for (long i = 0; i < std::labs(n); ++i) lift = m * lift;
  return lift;
}

const TorusPoint& PeriodicOrbit::at(long i) const {
  const long p = static_cast<long>(points.size());
  return points[static_cast<std::size_t>(((i % p) + p) % p)];
}

PeriodicOrbit orbit_of(const ToralAutomorphism& A, const TorusPoint& x, std::size_t max_period) {
  require(x.is_exact(), ErrorCode::PreconditionViolated, "periodic orbit needs an exact point");
  PeriodicOrbit o;
  o.points.push_back(x);
  TorusPoint y = iterate(A, x, 1);
  while (!(y == x)) {
    require(o.points.size() < max_period, ErrorCode::OverflowBudget, "orbit longer than max_period");
    o.points.push_back(y);
    y = iterate(A, y, 1);
  }
  return o;
}

PeriodicOrbit canonical(PeriodicOrbit o) {
  auto it = std::min_element(o.points.begin(), o.points.end());
  std::rotate(o.points.begin(), it, o.points.end());
  return o;
}

Integer periodic_point_count(const ToralAutomorphism& A, unsigned n) {
  const IntMatrix B = A.matrix().pow(n) - IntMatrix::identity(A.dimension());
  return abs(B.det());
}

namespace {

using i128 = __int128;

std::int64_t mod_n(const Integer& x, std::int64_t n) {
  Integer r;
  mpz_fdiv_r_ui(r.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(n));
  return r.get_si();
}

}  // namespace

std::vector<PeriodicOrbit> periodic_points(const ToralAutomorphism& A, unsigned n, std::uint64_t cap) {
  require(n >= 1, ErrorCode::PreconditionViolated, "period must be positive");
  const std::size_t d = A.dimension();
  const IntMatrix B = A.matrix().pow(n) - IntMatrix::identity(d);
  const SmithForm snf = smith_normal_form(B);
  const IntVec diag = snf.diagonal();
  Integer total = 1;
  for (const auto& x : diag) total *= x;
  if (total > Integer(static_cast<unsigned long>(cap)))
    throw Error(ErrorCode::OverflowBudget, "|det(A^n - I)| = " + total.get_str() + " exceeds cap");
  const std::int64_t N = total.get_si();
  const IntMatrix Vinv = snf.V.unimodular_inverse();

  std::vector<std::int64_t> dd(d), scale(d), stride(d);
  std::vector<std::int64_t> Vm(d * d), Vi(d * d), Am(d * d);
  std::int64_t acc = 1;
  for (std::size_t i = 0; i < d; ++i) {
    dd[i] = diag[i].get_si();
    scale[i] = N / dd[i];
    stride[i] = acc;
    acc *= dd[i];
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      Vm[i * d + j] = mod_n(snf.V(i, j), N);
      Vi[i * d + j] = mod_n(Vinv(i, j), N);
      Am[i * d + j] = mod_n(A.matrix()(i, j), N);
    }
  auto decode = [&](std::int64_t idx, std::vector<std::int64_t>& X) {
    std::fill(X.begin(), X.end(), 0);
    for (std::size_t c = 0; c < d; ++c) {
      const std::int64_t k = (idx / stride[c]) % dd[c];
      const std::int64_t w = static_cast<std::int64_t>(static_cast<i128>(k) * scale[c] % N);
      for (std::size_t r = 0; r < d; ++r) X[r] = static_cast<std::int64_t>((X[r] + static_cast<i128>(Vm[r * d + c]) * w) % N);
    }
  };
  auto encode = [&](const std::vector<std::int64_t>& X) {
    std::int64_t idx = 0;
    for (std::size_t r = 0; r < d; ++r) {
      i128 y = 0;
      for (std::size_t c = 0; c < d; ++c) y = (y + static_cast<i128>(Vi[r * d + c]) * X[c]) % N;
      idx += static_cast<std::int64_t>(y / scale[r]) % dd[r] * stride[r];
    }
    return idx;
  };
  auto step = [&](const std::vector<std::int64_t>& X, std::vector<std::int64_t>& Y) {
    for (std::size_t r = 0; r < d; ++r) {
      i128 y = 0;
      for (std::size_t c = 0; c < d; ++c) y += static_cast<i128>(Am[r * d + c]) * X[c];
      Y[r] = static_cast<std::int64_t>(y % N);
    }
  };

  std::vector<bool> seen(static_cast<std::size_t>(N), false);
  std::vector<std::vector<std::vector<std::int64_t>>> raw;
  std::vector<std::int64_t> X(d), Y(d);
  for (std::int64_t idx = 0; idx < N; ++idx) {
    if (seen[static_cast<std::size_t>(idx)]) continue;
    decode(idx, X);
    std::vector<std::vector<std::int64_t>> orbit;
    std::int64_t cur = idx;
    while (!seen[static_cast<std::size_t>(cur)]) {
      seen[static_cast<std::size_t>(cur)] = true;
      orbit.push_back(X);
      step(X, Y);
      X.swap(Y);
      cur = encode(X);
    }
    require(cur == idx && n % orbit.size() == 0, ErrorCode::PreconditionViolated, "inconsistent orbit");
    auto it = std::min_element(orbit.begin(), orbit.end());
    std::rotate(orbit.begin(), it, orbit.end());
    raw.push_back(std::move(orbit));
  }
  std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.front() < b.front();
  });
  std::vector<PeriodicOrbit> out;
  out.reserve(raw.size());
  for (const auto& orbit : raw) {
    PeriodicOrbit o;
    for (const auto& P : orbit) {
      RatVec q(d);
      for (std::size_t i = 0; i < d; ++i) {
        q[i] = Rational(static_cast<long>(P[i]), static_cast<unsigned long>(N));
        q[i].canonicalize();
      }
      o.points.push_back(TorusPoint::exact(std::move(q)));
    }
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<PeriodicOrbit> periodic_orbits_up_to(const ToralAutomorphism& A, unsigned period_cap,
                                                 std::uint64_t cap) {
  std::vector<PeriodicOrbit> out;
  for (unsigned n = 1; n <= period_cap; ++n)
    for (auto& o : periodic_points(A, n, cap))
      if (o.period() == n) out.push_back(std::move(o));
  return out;
}

Eigen::VectorXd HeteroclinicPoint::orbit_point(const ToralAutomorphism& A, long n) const {
  const auto& s = A.splitting();
  if (n >= 0) {
    Eigen::VectorXd base = q.at(n).vec();
    return reduce_mod1(base + s.from_eigen(s.power_eigen(eigen_s, n)));
  }
  Eigen::VectorXd base = p.at(n).vec();
  return reduce_mod1(base + s.from_eigen(s.power_eigen(eigen_u, n)));
}

HeteroclinicPoint heteroclinic_point(const ToralAutomorphism& A, const PeriodicOrbit& p,
                                     const PeriodicOrbit& q, double norm_bound, bool exclude_trivial) {
  const auto& sp = A.splitting();
  const std::size_t d = A.dimension();
  const long B = static_cast<long>(std::floor(norm_bound));
  const Eigen::VectorXd pt = p.base().vec(), qt = q.base().vec();
  std::vector<long> k(d, -B);
  bool found = false;
  HeteroclinicPoint best;
  for (;;) {
    Eigen::VectorXd kv(d);
    for (std::size_t i = 0; i < d; ++i) kv[static_cast<Eigen::Index>(i)] = static_cast<double>(k[i]);
    const Eigen::VectorXd xi = sp.V_inv * (qt + kv - pt);
    const double nrm = xi.norm();
    if (!(exclude_trivial && nrm < 1e-12)) {
      Eigen::VectorXd eu = Eigen::VectorXd::Zero(d), es = Eigen::VectorXd::Zero(d);
      eu.tail(sp.dim_u) = xi.tail(sp.dim_u);
      es.head(sp.dim_s) = -xi.head(sp.dim_s);
      Eigen::VectorXd lift = pt + sp.V * eu;
      bool better = !found || nrm < best.lift_norm * (1 - 1e-12) - 1e-15;
      if (!better && nrm <= best.lift_norm * (1 + 1e-12) + 1e-15) {
        better = std::lexicographical_compare(lift.begin(), lift.end(), best.lift.begin(), best.lift.end());
      }
      if (better) {
        found = true;
        best.lift = lift;
        best.eigen_u = eu;
        best.eigen_s = es;
        best.translate = k;
        best.lift_norm = nrm;
      }
    }
    std::size_t i = 0;
    while (i < d && k[i] == B) k[i++] = -B;
    if (i == d) break;
    ++k[i];
  }
  if (!found) throw Error(ErrorCode::NoSolutionInBound, "no translate within norm bound");
  best.point = TorusPoint::numeric(best.lift);
  best.p = p;
  best.q = q;
  return best;
}

PseudoOrbit::PseudoOrbit(const ToralAutomorphism& A, std::vector<TorusPoint> points, bool periodic)
    : points_(std::move(points)), periodic_(periodic) {
  const std::size_t n = points_.size();
  require(n >= 1, ErrorCode::PreconditionViolated, "empty pseudo-orbit");
  const std::size_t jumps = periodic ? n : n - 1;
  const std::size_t d = A.dimension();
  for (std::size_t i = 0; i < jumps; ++i) {
    const TorusPoint& a = points_[i];
    const TorusPoint& b = points_[(i + 1) % n];
    IntVec c(d);
    Eigen::VectorXd e(d);
    if (a.is_exact() && b.is_exact()) {
      RatVec v = A.matrix().apply(a.rational());
      for (std::size_t r = 0; r < d; ++r) {
        Rational diff = b.rational()[r] - v[r];
        Rational half(1, 2);
        c[r] = floor_q(diff + half);
        Rational ex = diff - Rational(c[r]);
        e[static_cast<Eigen::Index>(r)] = ex.get_d();
      }
    } else {
      Eigen::VectorXd v = b.vec() - A.matrix_d() * a.vec();
      for (std::size_t r = 0; r < d; ++r) {
        const double cr = std::round(v[static_cast<Eigen::Index>(r)]);
        c[r] = static_cast<long>(cr);
        e[static_cast<Eigen::Index>(r)] = v[static_cast<Eigen::Index>(r)] - cr;
      }
    }
    carries_.push_back(std::move(c));
    jumps_.push_back(std::move(e));
  }
}

double PseudoOrbit::delta() const {
  double m = 0;
  for (const auto& e : jumps_) m = std::max(m, e.norm());
  return m;
}

double ShadowConstants::geometric_bound(std::size_t i, std::size_t n, double delta) const {
  const std::size_t k = std::min(i, n - i);
  return C0 * std::pow(mu0, static_cast<double>(k)) * delta;
}

ShadowConstants shadow_constants(const ToralAutomorphism& A) {
  const auto& s = A.splitting();
  ShadowConstants c;
  c.kappa = s.kappa;
  c.mu_s = std::exp(s.rate_s);
  c.mu_u = std::exp(-s.rate_u);
  c.mu0 = std::max(c.mu_s, c.mu_u);
  c.C0 = 2.0 * c.kappa / (1.0 - c.mu0);
  c.delta0 = 1.0 / (4.0 * c.C0);
  return c;
}

namespace {

Rational exact_coord(const TorusPoint& p, std::size_t i) {
  return p.is_exact() ? p.rational()[i] : rational_from_double(p.coords()[i]);
}

}  // namespace

ShadowResult shadow_pseudo_orbit(const ToralAutomorphism& A, const PseudoOrbit& po) {
  ShadowResult res;
  res.constants = shadow_constants(A);
  const double delta = po.delta();
  if (delta >= res.constants.delta0)
    throw Error(ErrorCode::DeltaTooLarge, "delta " + std::to_string(delta) + " >= delta0 " +
                                               std::to_string(res.constants.delta0));
  const auto& sp = A.splitting();
  const std::size_t n = po.size(), d = A.dimension();
  const auto& pts = po.points();

  if (po.periodic()) {
    IntVec w(d, 0);
    for (std::size_t j = 0; j < n; ++j) {
      w = A.matrix().apply(w);
      for (std::size_t r = 0; r < d; ++r) w[r] += po.carries()[j][r];
    }
    const IntMatrix M = IntMatrix::identity(d) - A.matrix().pow(static_cast<unsigned>(n));
    RatVec y = solve_rational(M, RatVec(w.begin(), w.end()));
    for (std::size_t i = 0; i < n; ++i) {
      double s2 = 0;
      for (std::size_t r = 0; r < d; ++r) {
        Rational diff = y[r] - exact_coord(pts[i], r);
        const double x = diff.get_d();
        s2 += x * x;
      }
      res.orbit.push_back(TorusPoint::exact(y));
      res.distances.push_back(std::sqrt(s2));
      y = A.matrix().apply(y);
      for (std::size_t r = 0; r < d; ++r) y[r] += po.carries()[i][r];
    }
  } else {
    const int ds = sp.dim_s;
    std::vector<Eigen::VectorXd> eta;
    for (const auto& e : po.jumps()) eta.push_back(sp.to_eigen(e));
    std::vector<Eigen::VectorXd> xi(n, Eigen::VectorXd::Zero(d));
    for (std::size_t i = 0; i + 1 < n; ++i) {
      Eigen::VectorXd nxt = sp.power_eigen(xi[i], 1) - eta[i];
      xi[i + 1].head(ds) = nxt.head(ds);
    }
    Eigen::VectorXd u = Eigen::VectorXd::Zero(d);
    for (std::size_t i = n - 1; i-- > 0;) {
      Eigen::VectorXd tmp = Eigen::VectorXd::Zero(d);
      tmp.tail(d - ds) = u.tail(d - ds) + eta[i].tail(d - ds);
      u = sp.power_eigen(tmp, -1);
      xi[i].tail(d - ds) = u.tail(d - ds);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::VectorXd delta_i = sp.from_eigen(xi[i]);
      res.orbit.push_back(TorusPoint::numeric(pts[i].vec() + delta_i));
      res.distances.push_back(delta_i.norm());
    }
  }

  const auto& c = res.constants;
  std::vector<double> ej;
  for (const auto& e : po.jumps()) ej.push_back(e.norm());
  const double ws = po.periodic() ? 1.0 / (1.0 - std::pow(c.mu_s, static_cast<double>(n))) : 1.0;
  const double wu = po.periodic() ? 1.0 / (1.0 - std::pow(c.mu_u, static_cast<double>(n))) : 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double b = 0;
    for (std::size_t j = 0; j < ej.size(); ++j) {
      if (ej[j] == 0) continue;
      if (po.periodic()) {
        const std::size_t a = (i + n - 1 - j) % n;
        const std::size_t u = (j + n - i) % n + 1;
        b += ej[j] * (ws * std::pow(c.mu_s, static_cast<double>(a)) + wu * std::pow(c.mu_u, static_cast<double>(u)));
      } else if (j < i) {
        b += ej[j] * std::pow(c.mu_s, static_cast<double>(i - 1 - j));
      } else {
        b += ej[j] * std::pow(c.mu_u, static_cast<double>(j - i + 1));
      }
    }
    res.bounds.push_back(c.kappa * b);
  }
  res.max_error = res.distances.empty() ? 0 : *std::max_element(res.distances.begin(), res.distances.end());
  return res;
}

}  // namespace phlab::torus
