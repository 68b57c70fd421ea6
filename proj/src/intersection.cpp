#include <algorithm>
#include <cmath>
#include <limits>

#include "phlab/error.hpp"
#include "phlab/fiber.hpp"

namespace phlab::fiber {

namespace {

constexpr int kGrid = 1000;
constexpr double kInflation = 1.1;

bool remainders_ok(const IntervalMap& f, const IntervalMap& g, const IntervalMap& h, double a, double b,
                   double c, double eps, double X) {
  for (int i = 1; i <= 256; ++i) {
    const double x = X * i / 256.0;
    if (std::abs(f(x) - a * x) >= eps * x) return false;
    if (std::abs(g(x) - b * x) >= eps * x) return false;
    if (std::abs(h(x) - c * x) >= eps * x) return false;
    if (std::abs(f.derivative(x) - a) >= 0.5 * a) return false;
    if (std::abs(g.derivative(x) - b) >= 0.5 * b) return false;
    if (std::abs(h.derivative(x) - c) >= 0.5 * c) return false;
  }
  return true;
}

}  // namespace

SearchBudgetExhausted::SearchBudgetExhausted(IntersectionCertificate partial)
    : Error(ErrorCode::BudgetExhausted,
            "only " + std::to_string(partial.pairs.size()) + " index pairs found within caps"),
      partial_(std::move(partial)) {}

ThresholdAnalysis analyze_threshold(const IntervalMap& f, const IntervalMap& g, const IntervalMap& h, double epsilon) {
  require(epsilon > 0, ErrorCode::PreconditionViolated, "epsilon must be positive");
  ThresholdAnalysis t;
  t.epsilon = epsilon;
  t.alpha = f.derivative(0.0);
  t.beta = g.derivative(0.0);
  t.gamma = h.derivative(0.0);
  require(t.alpha > 0 && t.alpha < 1 && t.beta > 0 && t.beta < 1, ErrorCode::NotContracting,
          "f'(0) and g'(0) must lie in (0,1)");
  require(t.gamma > 0, ErrorCode::PreconditionViolated, "h'(0) must be positive");
  const double la = std::log(t.alpha), lb = std::log(t.beta);
  t.independence = rational_independence(la, lb, dirichlet_bound(la, lb, epsilon));
  t.independent = t.independence < epsilon;

  t.delta = 0;
  for (int j = 1; j <= 60; ++j) {
    const double d = std::ldexp(1.0, -j);
    if (remainders_ok(f, g, h, t.alpha, t.beta, t.gamma, epsilon, std::max(d, h(d)))) {
      t.delta = d;
      break;
    }
  }
  if (t.delta == 0) throw Error(ErrorCode::ThresholdNotMet, "no dyadic linearisation radius found");
  const double top = h(t.delta);
  t.D0 = {g(top), top};
  t.D = 0;
  for (int i = 0; i <= kGrid; ++i) {
    const double u = t.D0.lo + (t.D0.hi - t.D0.lo) * i / kGrid;
    t.D = std::max(t.D, u - g(u));
  }
  t.holder = g.holder().supplied ? g.holder() : estimate_holder(g, 0.0, top);
  const double C = std::max(1.0, t.holder.C);
  t.rho = std::exp(-C * C * std::pow(top, t.holder.theta) / (1.0 - std::pow(t.beta, t.holder.theta)));
  require(1.0 - t.beta - epsilon > 0, ErrorCode::ThresholdNotMet, "epsilon too coarse: 1 - beta - eps <= 0");
  t.eps2 = 3.0 * epsilon * t.D / (t.rho * (1.0 - t.beta - epsilon));

  const double e = t.eps2;
  double G = e;
  for (int i = 0; i <= kGrid; ++i) {
    const double u = t.D0.lo + (t.D0.hi - t.D0.lo) * i / kGrid;
    const double gu = g(u);
    G = std::max({G, gu + e - g(u - e), g.inverse(gu + e) - u + e, u - g.inverse(std::max(0.0, gu - e))});
  }
  t.G = kInflation * G;

  double L = 0, Lloc = 0;
  for (int i = 0; i <= kGrid; ++i) {
    const double s = t.D0.lo + (t.D0.hi - t.D0.lo) * i / kGrid;
    ClosedInterval J{std::max(0.0, s - t.G), s};
    for (int l = 0; l < 20000; ++l) {
      const double len = J.length();
      L = std::max(L, len);
      if (J.hi <= top) Lloc = std::max(Lloc, len);
      if (J.hi >= 1.0 - 1e-9) break;
      const ClosedInterval nxt{g.inverse(J.lo), g.inverse(J.hi)};
      if (nxt.hi <= J.hi) break;
      J = nxt;
    }
  }
  t.L = kInflation * L;
  t.L_local = kInflation * Lloc;
  t.L_discrepancy = t.L > kInflation * t.L_local;
  return t;
}

namespace {

std::vector<ClosedInterval> forward_images(const IntervalMap& g, ClosedInterval J, long n) {
  std::vector<ClosedInterval> out{J};
  for (long l = 1; l <= n; ++l) {
    J = {g(J.lo), g(J.hi)};
    out.push_back(J);
  }
  return out;
}

}  // namespace

IntersectionCertificate center_intersection_search(const IntervalMap& f, const IntervalMap& g, const IntervalMap& h,
                                                   const ClosedInterval& I, const ClosedInterval& J,
                                                   const SearchBudget& budget) {
  require(I.lo > 0 && I.hi < 1 && I.lo <= I.hi && J.lo > 0 && J.hi < 1 && J.lo < J.hi,
          ErrorCode::PreconditionViolated, "I, J must be closed intervals inside (0,1)");
  IntersectionCertificate cert;
  cert.threshold = analyze_threshold(f, g, h, budget.epsilon);
  cert.alpha = cert.threshold.alpha;
  cert.beta = cert.threshold.beta;
  if (J.length() <= cert.threshold.L)
    throw Error(ErrorCode::ThresholdNotMet,
                "|J| = " + std::to_string(J.length()) + " <= L(eps) = " + std::to_string(cert.threshold.L));

  const auto gl = forward_images(g, J, budget.l_max);
  const double la = std::log(cert.alpha), lb = std::log(cert.beta);
  ClosedInterval fk = I;
  long last_l = 0;
  double log_c = std::numeric_limits<double>::infinity();
  for (long k = 1; k <= budget.k_max; ++k) {
    fk = {f(fk.lo), f(fk.hi)};
    const ClosedInterval A{h(fk.lo), h(fk.hi)};
    // g^l(J) moves monotonically toward 0: overlapping l form a contiguous block
    auto first = std::partition_point(gl.begin() + 1, gl.end(), [&](const ClosedInterval& x) { return x.lo > A.hi; });
    long best_l = -1;
    double best = 0;
    for (auto it = first; it != gl.end() && it->hi >= A.lo; ++it) {
      const double ov = overlap_length(A, *it);
      if (ov > best) {
        best = ov;
        best_l = it - gl.begin();
      }
    }
    if (best_l <= last_l) continue;
    last_l = best_l;
    cert.pairs.push_back({k, best_l, *intersect(A, gl[static_cast<std::size_t>(best_l)])});
    log_c = std::min(log_c, std::log(best) - std::max(k * la, best_l * lb));
    cert.sup_deviation = std::max(cert.sup_deviation, std::abs(k * la - best_l * lb));
  }
  cert.c = cert.pairs.empty() ? 0.0 : std::exp(log_c);
  if (cert.pairs.size() < budget.n_min) throw SearchBudgetExhausted(cert);
  return cert;
}

std::vector<OraclePair> intersection_oracle(const IntervalMap& f, const IntervalMap& g, const IntervalMap& h,
                                            const ClosedInterval& I, const ClosedInterval& J, long K_max, long L_max) {
  require(K_max * L_max <= 10000, ErrorCode::PreconditionViolated, "oracle caps exceed 10^4 pairs");
  std::vector<ClosedInterval> hf;
  ClosedInterval x = I;
  for (long k = 1; k <= K_max; ++k) {
    x = {f(x.lo), f(x.hi)};
    hf.push_back({h(x.lo), h(x.hi)});
  }
  const auto gl = forward_images(g, J, L_max);
  std::vector<OraclePair> out;
  for (long k = 1; k <= K_max; ++k)
    for (long l = 1; l <= L_max; ++l) {
      const double ov = overlap_length(hf[static_cast<std::size_t>(k - 1)], gl[static_cast<std::size_t>(l)]);
      if (ov > 0) out.push_back({k, l, ov});
    }
  return out;
}

ProportionReport uniform_proportion_check(const IntervalMap& g, const ClosedInterval& J, double y, long i_lo,
                                          long i_hi, double neighborhood_hi) {
  require(0 <= i_lo && i_lo <= i_hi, ErrorCode::PreconditionViolated, "bad index range");
  require(y > 0 && y < 1, ErrorCode::PreconditionViolated, "y must lie in (0,1)");
  if (g.iterate(y, i_lo) > neighborhood_hi)
    throw Error(ErrorCode::RangeOutsideNeighborhood, "fundamental domains leave the analysed neighbourhood");
  const double gy = g(y);
  const ClosedInterval omega0{gy, y};

  // move J next to Omega_0 and collect the pieces of J* inside it
  ClosedInterval K = J;
  int guard = 0;
  while (K.lo > y && guard++ < 100000) K = g.image(K, 1);
  while (K.hi <= gy && guard++ < 100000) K = g.image(K, -1);
  std::vector<ClosedInterval> pieces;
  for (long m = -4; m <= 4; ++m) {
    if (auto ov = intersect(g.image(K, m), omega0); ov && ov->length() > 0) pieces.push_back(*ov);
  }
  std::sort(pieces.begin(), pieces.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
  std::vector<ClosedInterval> merged;
  for (const auto& p : pieces) {
    if (!merged.empty() && p.lo <= merged.back().hi)
      merged.back().hi = std::max(merged.back().hi, p.hi);
    else
      merged.push_back(p);
  }
  require(!merged.empty(), ErrorCode::PreconditionViolated, "J* misses the fundamental domain");

  ProportionReport r;
  const HolderData hd = g.holder().supplied ? g.holder() : estimate_holder(g, 0.0, neighborhood_hi);
  r.C = std::max(1.0, hd.C);
  r.theta = hd.theta;
  const double beta = g.derivative(0.0);
  r.rho_bound = std::exp(-r.C * r.C / (1.0 - std::pow(beta, r.theta)));

  double top = g.iterate(y, i_lo);
  std::vector<ClosedInterval> cur = merged;
  for (auto& p : cur) p = g.image(p, i_lo);
  r.min_ratio = std::numeric_limits<double>::infinity();
  r.max_ratio = 0;
  for (long i = i_lo; i <= i_hi; ++i) {
    const double bottom = g(top);
    double len = 0;
    for (const auto& p : cur) len += p.length();
    const double ratio = len / (top - bottom);
    r.ratios.push_back(ratio);
    r.min_ratio = std::min(r.min_ratio, ratio);
    r.max_ratio = std::max(r.max_ratio, ratio);
    top = bottom;
    for (auto& p : cur) p = g.image(p, 1);
  }
  r.rho_hat = r.min_ratio / r.max_ratio;
  r.bound_holds = r.rho_hat >= r.rho_bound;
  return r;
}

}  // namespace phlab::fiber
