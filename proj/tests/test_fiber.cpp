#include <cmath>
#include <random>

#include "doctest.h"
#include "phlab/error.hpp"
#include "phlab/fiber.hpp"

using namespace phlab;
using namespace phlab::fiber;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::IoError;
}

// f(t) - t by plain bisection on a bracket, no grid.
double bisect_fixed(const IntervalMap& f, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    double m = 0.5 * (lo + hi);
    if (f(m) - m < 0)
      lo = m;
    else
      hi = m;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("interval map basics") {
  auto m = IntervalMap::mobius(0.5);
  CHECK(m(0.0) == 0.0);
  CHECK(m(1.0) == doctest::Approx(1.0));
  CHECK(m.inverse(m(0.3)) == doctest::Approx(0.3).epsilon(1e-14));
  m.check();
  auto p = IntervalMap::polynomial({0, 0.5, 0.5});
  CHECK(p.boundary_preserving());
  CHECK(p.inverse(p(1e-200)) == doctest::Approx(1e-200).epsilon(1e-12));
  CHECK(p.inverse(p(0.7)) == doctest::Approx(0.7).epsilon(1e-14));
  auto pw = IntervalMap::power(0.3, 2);
  CHECK(pw(1.0) == doctest::Approx(1.0));
  CHECK(pw.derivative(0.0) == doctest::Approx(0.3));
  CHECK(code_of([] { IntervalMap::polynomial({0, -1, 2}).check(); }) == ErrorCode::PreconditionViolated);
  auto img = p.image({0.2, 0.4}, 3);
  CHECK(img.lo == doctest::Approx(p(p(p(0.2)))));
}

TEST_CASE("ns_analyze examples") {
  auto a = ns_analyze(IntervalMap::polynomial({0, 0.5, 0.5}));
  CHECK(a.alpha == doctest::Approx(0.5));
  CHECK(a.smallest_fixed == 1.0);
  auto b = ns_analyze(IntervalMap::linear(0.5));
  CHECK(b.alpha == doctest::Approx(0.5));
  CHECK(b.smallest_fixed == 1.0);
  CHECK(b.pinned);
  auto cubic = IntervalMap::polynomial({0, 0.5, 1.5, -1});
  auto c = ns_analyze(cubic);
  CHECK(std::abs(c.smallest_fixed - 0.5) < 1e-10);
  CHECK(std::abs(c.smallest_fixed - bisect_fixed(cubic, 0.3, 0.7)) < 1e-10);
  // fixed points 0, 0.37, 1 with f'(0) = 0.6
  const double k = 0.4 / 0.37;
  auto planted = IntervalMap::polynomial({0, 1 - 0.37 * k, 1.37 * k, -k});
  auto d = ns_analyze(planted);
  CHECK(std::abs(d.smallest_fixed - 0.37) < 1e-10);
  CHECK(code_of([] { ns_analyze(IntervalMap::polynomial({0, 1.5, -0.5})); }) == ErrorCode::NotContracting);
}

TEST_CASE("ns_analyze property: rescaled map has exactly two fixed points and attracts to 0") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(0.1, 0.8), S(0.2, 0.9);
  for (int trial = 0; trial < 30; ++trial) {
    const double alpha = U(rng), s = S(rng);
    const double k = (1 - alpha) / s;
    auto f = IntervalMap::polynomial({0, 1 - s * k, (1 + s) * k, -k});
    if (f.derivative(1.0) <= 0) continue;
    auto m = ns_analyze(f);
    CHECK(std::abs(m.smallest_fixed - s) < 1e-10);
    const auto& r = m.rescaled;
    CHECK(r(0.0) == 0.0);
    CHECK(r(1.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (double t = 0.05; t < 0.999; t += 0.05) {
      CHECK(r(t) < t);
      double x = t;
      for (int i = 0; i < 200; ++i) {
        const double nx = r(x);
        CHECK(nx <= x);
        x = nx;
      }
      CHECK(x < 1e-6);
    }
  }
}

TEST_CASE("rational independence") {
  for (double b : {1.0, 2.5, -3.0}) {
    CHECK(rational_independence(3.0 * b / 7.0, b, 7) == doctest::Approx(std::abs(b) / 7).epsilon(1e-15));
    CHECK(rational_independence(3.0 * b / 7.0, b, 100) == doctest::Approx(std::abs(b) / 7).epsilon(1e-15));
  }
  CHECK(rational_independence(1, 1, 5) == 1.0);
  const double phi = (1 + std::sqrt(5.0)) / 2;
  double prev = 10;
  for (long K : {2, 5, 13, 34, 89, 233, 610, 1000}) {
    const double v = rational_independence(phi, 1, K);
    CHECK(v <= prev);
    prev = v;
  }
  CHECK(prev < 1e-3);
  // brute force oracle on small K
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-3, 3);
  for (int trial = 0; trial < 100; ++trial) {
    double a = U(rng), b = U(rng);
    if (std::abs(b) < 0.1) continue;
    const long K = 1 + trial % 20;
    double best = 1e300;
    for (long k = -K; k <= K; ++k)
      for (long l = -K; l <= K; ++l) {
        double v = std::abs(k * a + l * b);
        if ((k || l) && v > 1e-12) best = std::min(best, v);
      }
    CHECK(rational_independence(a, b, K) == doctest::Approx(best).epsilon(1e-12));
    // sign symmetry and scaling
    const double lam = U(rng) + 4.0;
    CHECK(rational_independence(-a, b, K) == doctest::Approx(best).epsilon(1e-12));
    CHECK(rational_independence(lam * a, lam * b, K) == doctest::Approx(lam * best).epsilon(1e-10));
    CHECK(rational_independence(-lam * a, -lam * b, K) == doctest::Approx(lam * best).epsilon(1e-10));
  }
}

TEST_CASE("rotation density") {
  CHECK(rotation_density_check(0.5, 1.0, 0.6));
  CHECK_FALSE(rotation_density_check(1.0, 1.0, 0.4));
  CHECK_FALSE(rotation_density_check(2.0, 2.0, 0.4));
  CHECK(rotation_density_check(std::sqrt(2.0), 1.0, 0.01));
  CHECK(rotation_density_check(std::sqrt(2.0) * 3, 3.0, 0.05));
  CHECK_FALSE(rotation_density_check(0.2, 1.0, 0.19));
  CHECK(rotation_density_check(0.2, 1.0, 0.21));
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> U(0.1, 5), E(0.005, 0.5);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = U(rng), b = U(rng), eps = E(rng) * b;
    auto d = rotation_density_detail(a, b, eps);
    CHECK_FALSE(d.truncated);
    CHECK(d.dense == (d.independence < eps));
  }
}

TEST_CASE("select_independent") {
  const double b = 1.0, eps = 0.1;
  CHECK(select_independent(0.5, 0.5 + eps / 2, b, eps) == 0.5 + eps / 2);
  const double c = select_independent(1.0 / 3, 1.0 / 3 + eps / 3, b, eps);
  CHECK(rational_independence(c, b, dirichlet_bound(c, b, eps)) < eps);
  CHECK(code_of([] { select_independent(0.3, 1.3, 1.0, 0.1); }) == ErrorCode::PreconditionViolated);
  CHECK(code_of([] { select_independent(0.3, 0.5, 1.0, 0.1); }) == ErrorCode::PreconditionViolated);
}

TEST_CASE("uniform proportion") {
  auto lin = IntervalMap::linear(0.4);
  auto r = uniform_proportion_check(lin, {0.11, 0.13}, 0.2, 0, 30, 0.5);
  CHECK(r.rho_hat == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.bound_holds);
  auto g = IntervalMap::polynomial({0, 0.5, 0.25});
  auto q = uniform_proportion_check(g, {0.3, 0.35}, 0.4, 10, 40, 0.5);
  CHECK(q.rho_hat > 0.9);
  CHECK(q.rho_hat <= 1.0);
  CHECK(q.bound_holds);
  auto full = uniform_proportion_check(g, {g(0.4), 0.4}, 0.4, 0, 20, 0.5);
  for (double x : full.ratios) CHECK(x == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(code_of([&] { uniform_proportion_check(g, {0.3, 0.35}, 0.4, 0, 5, 0.1); }) ==
        ErrorCode::RangeOutsideNeighborhood);
}
