#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "phlab/error.hpp"
#include "phlab/skew.hpp"

namespace phlab::skew {

namespace {

struct BackwardPair {
  std::vector<Eigen::VectorXd> xs, ys;  // index k holds A^-k x, A^-k y (k >= 1)
};

Point span_of(const Eigen::VectorXd& v) { return {v.data(), std::size_t(v.size())}; }

// Unstable displacement v with y = x + v mod 1, |v| <= leaf_distance.
std::optional<Eigen::VectorXd> unstable_displacement(const ToralAutomorphism& A, const Eigen::VectorXd& x,
                                                     const Eigen::VectorXd& y, double leaf_distance) {
  const auto& sp = A.splitting();
  const std::size_t d = A.dimension();
  Eigen::VectorXd base = y - x;
  for (std::size_t i = 0; i < d; ++i) base[i] -= std::round(base[i]);
  const int R = int(std::ceil(leaf_distance)) + 1;
  std::vector<int> k(d, -R);
  std::optional<Eigen::VectorXd> best;
  for (;;) {
    Eigen::VectorXd v = base;
    for (std::size_t i = 0; i < d; ++i) v[i] += k[i];
    const double n = v.norm();
    if (n <= leaf_distance + 1e-12) {
      const Eigen::VectorXd xi = sp.to_eigen(v);
      const double s = xi.head(sp.dim_s).norm();
      if (s <= 1e-9 * std::max(1.0, n) && (!best || n < best->norm())) best = v;
    }
    std::size_t i = 0;
    while (i < d && ++k[i] > R) k[i++] = -R;
    if (i == d) break;
  }
  return best;
}

double holonomy_eval(const SkewProduct& F, const BackwardPair& b, long N, double t, double* deriv) {
  const auto& f = F.fiber();
  double s = t, ld = 0;
  for (long k = 1; k <= N; ++k) {
    s = f.inverse(span_of(b.xs[k]), s);
    ld -= f.log_dt(span_of(b.xs[k]), s);
  }
  for (long k = N; k >= 1; --k) {
    ld += f.log_dt(span_of(b.ys[k]), s);
    s = f(span_of(b.ys[k]), s);
  }
  if (deriv) *deriv = std::exp(ld);
  return s;
}

}  // namespace

HolonomyResult unstable_holonomy_fiber(const SkewProduct& F, const TorusPoint& x, const TorusPoint& y, long N,
                                       double leaf_distance, double tol) {
  require(N >= 1, ErrorCode::PreconditionViolated, "truncation must be positive");
  require(x.dimension() == F.dimension() && y.dimension() == F.dimension(), ErrorCode::PreconditionViolated,
          "point dimension");
  const auto& A = F.base();
  const auto& sp = A.splitting();
  auto v = unstable_displacement(A, x.vec(), y.vec(), leaf_distance);
  if (!v) throw Error(ErrorCode::NotSameLeaf, x.to_string() + " and " + y.to_string());
  Eigen::VectorXd xi = sp.to_eigen(*v);
  xi.head(sp.dim_s).setZero();

  const long M = N + 10;
  auto b = std::make_shared<BackwardPair>();
  b->xs.resize(M + 1);
  b->ys.resize(M + 1);
  b->xs[0] = x.vec();
  TorusPoint cur = x;
  Eigen::VectorXd curd = x.vec();
  for (long k = 1; k <= M; ++k) {
    if (x.is_exact()) {
      cur = torus::iterate(A, cur, -1);
      b->xs[k] = cur.vec();
    } else {
      curd = torus::reduce_mod1(A.inverse_d() * curd);
      b->xs[k] = curd;
    }
    b->ys[k] = b->xs[k] + sp.from_eigen(sp.power_eigen(xi, -k));
  }

  HolonomyResult r;
  r.N = N;
  for (int i = 0; i <= 64; ++i) {
    const double t = i / 64.0;
    r.cauchy = std::max(r.cauchy, std::abs(holonomy_eval(F, *b, N, t, nullptr) - holonomy_eval(F, *b, M, t, nullptr)));
  }
  double d1 = 0, d2 = 0;
  holonomy_eval(F, *b, N, 0, &d1);
  holonomy_eval(F, *b, M, 0, &d2);
  r.derivative_gap = std::abs(d1 - d2);
  if (!(r.cauchy < tol)) {
    std::ostringstream os;
    os << "Cauchy difference " << r.cauchy << " at N = " << N;
    throw Error(ErrorCode::NoConvergence, os.str());
  }

  auto rev = std::make_shared<BackwardPair>(BackwardPair{b->ys, b->xs});
  auto G = std::make_shared<SkewProduct>(F);
  r.map = fiber::IntervalMap(
      "unstable_holonomy", [G, b, N](double t) { return holonomy_eval(*G, *b, N, t, nullptr); },
      [G, b, N](double t) {
        double d = 0;
        holonomy_eval(*G, *b, N, t, &d);
        return d;
      },
      [G, rev, N](double t) { return holonomy_eval(*G, *rev, N, t, nullptr); });
  return r;
}

}  // namespace phlab::skew
