#include <algorithm>
#include <cmath>
#include <sstream>

#include "phlab/experiments.hpp"

namespace phlab::experiments {

namespace {

using torus::HeteroclinicPoint;
using torus::TorusPoint;

HeteroclinicPoint connect(const torus::ToralAutomorphism& A, const PeriodicOrbit& from, const PeriodicOrbit& to) {
  for (double bound : {3.0, 6.0, 12.0}) {
    try {
      return torus::heteroclinic_point(A, from, to, bound, true);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoSolutionInBound) throw;
    }
  }
  throw Error(ErrorCode::NoSolutionInBound, "no heteroclinic point within norm 12");
}

double dist(const Eigen::VectorXd& a, const TorusPoint& b) { return torus::torus_distance(a, b.vec()); }

long round_up(long v, long step) { return (v + step - 1) / step * step; }

// Smallest positive multiple of step with pred true.
template <class Pred>
long first_multiple(long step, long cap, Pred pred) {
  for (long k = step; k <= cap; k += step)
    if (pred(k)) return k;
  throw Error(ErrorCode::NoConvergence, "no admissible segment length below " + std::to_string(cap));
}

PeriodicOrbit shadow(const torus::ToralAutomorphism& A, const std::vector<Eigen::VectorXd>& pts, double& max_jump,
                     double& error, bool& periodic) {
  std::vector<TorusPoint> tp;
  tp.reserve(pts.size());
  for (const auto& p : pts) tp.push_back(TorusPoint::numeric(p));
  const torus::PseudoOrbit po(A, std::move(tp), true);
  max_jump = std::max(max_jump, po.delta());
  const auto sh = torus::shadow_pseudo_orbit(A, po);
  error = std::max(error, sh.max_error);
  PeriodicOrbit o{sh.orbit};
  periodic = periodic && torus::iterate(A, o.base(), long(o.period())) == o.base();
  for (std::size_t i = 0; periodic && i + 1 < o.period(); ++i)
    periodic = torus::iterate(A, o.points[i], 1) == o.points[i + 1];
  return o;
}

}  // namespace

CandidateExhausted::CandidateExhausted(AriReport partial)
    : Error(ErrorCode::CandidateExhausted,
            "no pool orbit in the dyadic window for m = " + std::to_string(partial.achieved_m + 1) +
                " (achieved m = " + std::to_string(partial.achieved_m) + ")"),
      partial_(std::move(partial)) {}

AriReport ari_sequence_build(const SkewProduct& F, const PeriodicOrbit& p0_in, const PeriodicOrbit& q0_in,
                             int m_max, unsigned pool_period_cap, std::vector<PeriodicOrbit> pool) {
  require(m_max >= 1, ErrorCode::PreconditionViolated, "m_max must be positive");
  const auto& A = F.base();
  const PeriodicOrbit p0 = torus::canonical(p0_in), q0 = torus::canonical(q0_in);
  AriReport rep;
  rep.p0 = p0;
  rep.q0 = q0;
  const auto b0 = skew::birkhoff_sum(F, p0, 0), bq = skew::birkhoff_sum(F, q0, 0);
  rep.S_p0 = b0.S;
  rep.S_q0 = bq.S;
  require(b0.lambda_c < 0 && bq.lambda_c > 0, ErrorCode::PreconditionViolated, "need lambda^c(p0) < 0 < lambda^c(q0)");

  std::vector<std::pair<PeriodicOrbit, double>> cand;
  if (pool.empty()) {
    rep.pool_period_cap = pool_period_cap;
    for (auto& e : birkhoff_density_scan(F, 0, pool_period_cap, 1, 0.1).pool) cand.emplace_back(e.orbit, e.sum.S);
  } else {
    for (auto& o : pool) cand.emplace_back(o, skew::birkhoff_sum(F, o, 0).S);
  }
  rep.pool_size = cand.size();

  const auto sc = torus::shadow_constants(A);
  const auto hol = skew::holder_estimate(F.fiber(), F.dimension());
  rep.C = hol.C_phi * sc.C0 * 2 * sc.delta0 / (1 - sc.mu0) + 1;
  const long pi0 = long(p0.period());
  constexpr long kCap = 100000;

  for (int m = 1; m <= m_max; ++m) {
    AriStep st;
    st.m = m;
    const double lo = std::ldexp(1.0, -m), hi = std::ldexp(1.0, -m + 1);
    auto it = cand.end();
    double best = INFINITY;
    for (auto c = cand.begin(); c != cand.end(); ++c) {
      const double g = std::abs(c->second - rep.S_p0);
      if (!(lo < g && g < hi)) continue;
      const double off = std::abs(c->second / double(c->first.period()) - b0.lambda_c);
      if (off < best) best = off, it = c;
    }
    if (it == cand.end()) throw CandidateExhausted(rep);
    st.pbar = it->first;
    st.S_pbar = it->second;
    const long pib = long(st.pbar.period());
    st.eps_bar = std::ldexp(1.0, -(m + 4)) / (2 * rep.C);

    const auto x0 = connect(A, p0, st.pbar);  // W^u(p0) and W^s(pbar)
    const auto y0 = connect(A, st.pbar, p0);  // W^u(pbar) and W^s(p0)
    const double tail = hol.C_phi / (1 - sc.mu0);
    auto near_pbar = [&](long k) {
      return std::max(dist(x0.orbit_point(A, k), st.pbar.at(k)), dist(y0.orbit_point(A, -k), st.pbar.at(-k)));
    };
    auto near_p0 = [&](long l) {
      return std::max(dist(y0.orbit_point(A, l), p0.at(l)), dist(x0.orbit_point(A, -l), p0.at(-l)));
    };
    auto jump_pbar = [&](long k) {
      return torus::torus_distance(torus::reduce_mod1(A.matrix_d() * x0.orbit_point(A, k - 1)),
                                   y0.orbit_point(A, -k));
    };
    auto jump_p0 = [&](long l) {
      return torus::torus_distance(torus::reduce_mod1(A.matrix_d() * y0.orbit_point(A, l - 1)),
                                   x0.orbit_point(A, -l));
    };
    const double half = 0.5 * sc.delta0 * st.eps_bar;
    st.K0 = first_multiple(pib, kCap, [&](long k) { return tail * near_pbar(k) < st.eps_bar / 4; });
    st.K1 = first_multiple(pib, kCap, [&](long k) { return near_pbar(k) < half && jump_pbar(k) < 2 * half; });
    st.K = std::max({st.K0, st.K1, m * pib});
    st.L0 = first_multiple(pi0, kCap, [&](long l) { return tail * near_p0(l) < st.eps_bar / 4; });
    st.L1 = first_multiple(pi0, kCap, [&](long l) { return near_p0(l) < half && jump_p0(l) < 2 * half; });
    st.L = round_up(std::max({st.L0, st.L1, m * st.K}), pi0);

    std::vector<Eigen::VectorXd> P1;
    for (long n = -st.K; n < st.L; ++n) P1.push_back(y0.orbit_point(A, n));
    for (long n = -st.L; n < st.K; ++n) P1.push_back(x0.orbit_point(A, n));
    std::vector<Eigen::VectorXd> P2 = P1;
    for (long j = 0; j < pib; ++j) P2.push_back(st.pbar.at(st.K + j).vec());

    std::vector<double> terms;
    for (const auto& x : P1) terms.push_back(F.fiber().log_dt({x.data(), std::size_t(x.size())}, 0));
    const double lam_bar = st.S_pbar / double(pib);
    st.P = skew::stable_sum(std::move(terms)) - 2 * double(st.K) * lam_bar - 2 * double(st.L) * b0.lambda_c;
    st.drift_bound = (std::abs(st.P) + st.eps_bar + 2 * double(st.K) * std::abs(lam_bar - b0.lambda_c) +
                      rep.C * st.eps_bar) /
                     double(2 * st.K + 2 * st.L);

    st.exact_periodic = true;
    const PeriodicOrbit s1 = shadow(A, P1, st.jump, st.shadow_error, st.exact_periodic);
    const PeriodicOrbit s2 = shadow(A, P2, st.jump, st.shadow_error, st.exact_periodic);
    st.period_prime = s1.period();
    st.period_double = s2.period();
    st.S_prime = skew::birkhoff_sum(F, s1, 0).S;
    st.S_double = skew::birkhoff_sum(F, s2, 0).S;
    st.sandwich = std::abs(st.S_double - st.S_prime - rep.S_p0);
    st.sandwich_holds = std::ldexp(1.0, -m - 1) < st.sandwich && st.sandwich < std::ldexp(1.0, -m + 2);

    const double eps_m = std::ldexp(1.0, -m + 2);
    const double a = fiber::select_independent(st.S_prime, st.S_double, rep.S_p0, eps_m);
    const bool prime = a == st.S_prime;
    st.chosen = prime ? "prime" : "double";
    const PeriodicOrbit& pm = prime ? s1 : s2;
    st.S_pm = a;
    st.lambda_pm = a / double(pm.period());
    st.drift = std::abs(st.lambda_pm - b0.lambda_c);

    const double B = std::abs(rep.S_q0);
    double ar = std::fmod(st.S_pm, B);
    if (ar < 0) ar += B;
    st.independence_K = fiber::dirichlet_bound(ar, B, st.eps_bar);
    st.independence = fiber::rational_independence(ar, B, st.independence_K);

    st.pliss_applicable = st.lambda_pm < b0.lambda_c / 3;
    if (st.pliss_applicable) {
      const auto pl = pliss_reindex(F, pm, b0.lambda_c / 3);
      st.pliss_shift = pl.shift;
      st.center_size = pl.center_size;
      st.center_bound = pl.center_bound;
    }

    rep.steps.push_back(std::move(st));
    rep.achieved_m = m;
  }

  rep.all_sandwiches = rep.monotone_independence = rep.monotone_drift = true;
  for (std::size_t i = 0; i < rep.steps.size(); ++i) {
    rep.all_sandwiches = rep.all_sandwiches && rep.steps[i].sandwich_holds && rep.steps[i].exact_periodic;
    if (i == 0) continue;
    rep.monotone_independence = rep.monotone_independence && rep.steps[i].independence < rep.steps[i - 1].independence;
    rep.monotone_drift = rep.monotone_drift && rep.steps[i].drift < rep.steps[i - 1].drift;
  }
  return rep;
}

}  // namespace phlab::experiments
