#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "phlab/error.hpp"
#include "phlab/fiber.hpp"

namespace phlab::fiber {

namespace {

// Best rational p/q (q <= K) of x by continued fractions, when x equals it to rounding.
bool near_rational(double x, long K, long& p, long& q) {
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double y = x;
  for (int it = 0; it < 64; ++it) {
    const double fl = std::floor(y);
    if (std::abs(fl) > 1e15) return false;
    const long a = static_cast<long>(fl);
    const long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > K) return false;
    p0 = p1, q0 = q1, p1 = p2, q1 = q2;
    if (std::abs(x - static_cast<double>(p1) / static_cast<double>(q1)) <= 8 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
      p = p1, q = q1;
      return true;
    }
    const double r = y - fl;
    if (r <= 0) return false;
    y = 1.0 / r;
  }
  return false;
}

long ext_gcd(long a, long b, long& x, long& y) {
  if (b == 0) {
    x = a >= 0 ? 1 : -1;
    y = 0;
    return std::labs(a);
  }
  long x1, y1;
  const long g = ext_gcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

}  // namespace

IndependenceValue rational_independence_detail(double a, double b, long K) {
  require(b != 0.0, ErrorCode::PreconditionViolated, "b must be nonzero");
  require(K >= 1, ErrorCode::PreconditionViolated, "K must be positive");
  IndependenceValue best;
  best.value = std::numeric_limits<double>::infinity();

  long p = 0, q = 1;
  if (near_rational(a / b, K, p, q)) {
    // ka + lb = (b/q)(kp + lq); Bezout gives kp + lq = 1
    long k = 0, l = 0;
    ext_gcd(p, q, k, l);
    if (std::labs(k) <= K && std::labs(l) <= K) {
      best.value = std::abs(b) / static_cast<double>(q);
      best.k = k, best.l = l;
      best.rational_shortcut = true;
      return best;
    }
  }
  for (long k = 0; k <= K; ++k) {
    const double ka = static_cast<double>(k) * a;
    const long l0 = std::lround(-ka / b);
    for (long l : {l0 - 1, l0, l0 + 1, -K, K}) {
      l = std::clamp(l, -K, K);
      if (k == 0 && l == 0) continue;
      const double v = std::abs(ka + static_cast<double>(l) * b);
      const double scale = std::abs(ka) + std::abs(static_cast<double>(l) * b);
      if (v <= 1e-13 * scale) continue;
      if (v < best.value) {
        best.value = v;
        best.k = k, best.l = l;
      }
    }
  }
  return best;
}

double rational_independence(double a, double b, long K) { return rational_independence_detail(a, b, K).value; }

long dirichlet_bound(double a, double b, double eps) {
  const double Q = std::ceil(std::abs(b) / eps) + 1;
  const double lscale = std::ceil(std::abs(a) / std::abs(b)) + 1;
  return static_cast<long>(Q * lscale);
}

DensityCheck rotation_density_detail(double a, double b, double eps) {
  require(b != 0.0 && eps > 0, ErrorCode::PreconditionViolated, "b != 0 and eps > 0 required");
  const long double B = std::abs(static_cast<long double>(b));
  long double ar = std::fmod(static_cast<long double>(a), B);
  if (ar < 0) ar += B;
  DensityCheck out;
  const IndependenceValue iv =
      rational_independence_detail(static_cast<double>(ar), static_cast<double>(B),
                                   dirichlet_bound(static_cast<double>(ar), static_cast<double>(B), eps));
  out.independence = iv.value;
  constexpr std::size_t kMargin = 16;
  constexpr long double kCap = 1e8;
  const long double per = std::ceil(B / iv.value);
  long double n = iv.value < eps ? std::max(1L, std::labs(iv.k)) * per + kMargin : per + kMargin;
  if (n > kCap) {
    n = kCap;
    out.truncated = true;
  }
  out.steps = static_cast<std::size_t>(n);

  // bins of width eps/4 keep min/max, enough to recover the exact largest gap
  const long double w = static_cast<long double>(eps) / 4;
  const std::size_t nb = static_cast<std::size_t>(std::ceil(B / w)) + 1;
  std::vector<double> lo(nb, std::numeric_limits<double>::infinity()), hi(nb, -1.0);
  for (std::size_t i = 0; i < out.steps; ++i) {
    long double x = std::fmod(static_cast<long double>(i) * ar, B);
    const std::size_t bin = std::min(nb - 1, static_cast<std::size_t>(x / w));
    const double xd = static_cast<double>(x);
    lo[bin] = std::min(lo[bin], xd);
    hi[bin] = std::max(hi[bin], xd);
  }
  double first = -1, prev = -1, gap = 0;
  for (std::size_t k = 0; k < nb; ++k) {
    if (hi[k] < 0) continue;
    if (first < 0) first = lo[k];
    if (prev >= 0) gap = std::max(gap, lo[k] - prev);
    prev = hi[k];
  }
  gap = std::max(gap, static_cast<double>(B) - prev + first);
  out.max_gap = gap;
  out.dense = gap < eps;
  return out;
}

bool rotation_density_check(double a, double b, double eps) { return rotation_density_detail(a, b, eps).dense; }

double select_independent(double a1, double a2, double b, double eps) {
  require(b != 0.0 && eps > 0, ErrorCode::PreconditionViolated, "b != 0 and eps > 0 required");
  const double B = std::abs(b);
  double diff = std::fmod(a1 - a2, B);
  if (diff > B / 2) diff -= B;
  if (diff <= -B / 2) diff += B;
  if (std::abs(diff) <= 1e-15 * B || std::abs(diff) >= eps)
    throw Error(ErrorCode::PreconditionViolated, "need 0 < |a1 - a2| < eps mod b");
  for (double a : {a1, a2}) {
    double ar = std::fmod(a, B);
    if (ar < 0) ar += B;
    if (rational_independence(ar, B, dirichlet_bound(ar, B, eps)) < eps) return a;
  }
  throw Error(ErrorCode::PreconditionViolated, "neither candidate certified below eps");
}

}  // namespace phlab::fiber
