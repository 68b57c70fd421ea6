#include <cmath>
#include <numbers>

#include "doctest.h"
#include "phlab/error.hpp"
#include "phlab/skew.hpp"

using namespace phlab;
using namespace phlab::skew;
using phlab::torus::TorusPoint;

namespace {

const auto kCat = torus::validate_automorphism({{2, 1}, {1, 1}});
const double kPhi = (1 + std::sqrt(5.0)) / 2;

SkewProduct kan(double eps) { return SkewProduct(kCat, FiberFamily::kan(KanFamilyParams::standard(2, eps))); }

TorusPoint pt(long a, long b, long den) { return TorusPoint::exact({Rational(a, den), Rational(b, den)}); }

PeriodicOrbit period_two() { return torus::orbit_of(kCat, pt(3, 1, 5)); }

}  // namespace

TEST_CASE("domination margins") {
  auto m = kan(0.3).margins();
  CHECK(m.stable == doctest::Approx(0.7 - 1 / (kPhi * kPhi)).epsilon(1e-12));
  CHECK(m.unstable == doctest::Approx(kPhi * kPhi - 1.3).epsilon(1e-12));
  CHECK(m.grid_points >= 64 * 64 * 64);
  auto m0 = kan(0).margins();
  CHECK(m0.stable == doctest::Approx(1 - 1 / (kPhi * kPhi)));
  CHECK(m0.unstable == doctest::Approx(kPhi * kPhi - 1));
  try {
    kan(0.7);
    FAIL("expected DominationViolated");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DominationViolated);
  }
}

TEST_CASE("fiber family basics") {
  auto F = kan(0.3);
  const auto& f = F.fiber();
  for (double x0 : {0.0, 0.13, 0.5, 0.77})
    for (double x1 : {0.0, 0.4}) {
      std::vector<double> x{x0, x1};
      CHECK(f(x, 0.0) == 0.0);
      CHECK(f(x, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
      for (int i = 0; i <= 20; ++i) {
        const double t = i / 20.0;
        CHECK(f.dt(x, t) > 0);
        CHECK(f.inverse(x, f(x, t)) == doctest::Approx(t).epsilon(1e-14));
        const double h = 1e-6;
        if (t > h && t < 1 - h) CHECK(f.dt(x, t) == doctest::Approx((f(x, t + h) - f(x, t - h)) / (2 * h)).epsilon(1e-7));
      }
    }
  // normalization keeps sup |psi| <= 1
  KanFamilyParams p;
  p.epsilon = 0.2;
  p.psi = {{{1, 0}, 2, 0}, {{0, 1}, 0, 1}};
  auto g = FiberFamily::kan(p);
  CHECK(g.kan_params().coefficient_sum() == doctest::Approx(1));
  CHECK(FiberFamily::kan(KanFamilyParams::standard(2)).kan_params() == KanFamilyParams::standard(2));
}

TEST_CASE("flow") {
  for (double s : {0.0, 0.1, 0.5, 0.9, 1.0}) {
    CHECK(flow(s, 0) == s);
    CHECK(flow(flow(s, 0.3), 0.4) == doctest::Approx(flow(s, 0.7)).epsilon(1e-14));
    CHECK(flow(flow(s, 0.3), -0.3) == doctest::Approx(s).epsilon(1e-14));
    // s' = s(s - 1)
    const double h = 1e-6;
    CHECK((flow(s, h) - flow(s, -h)) / (2 * h) == doctest::Approx(s * (s - 1)).epsilon(1e-6));
  }
  CHECK(flow_derivative(0, 0.2) == doctest::Approx(std::exp(-0.2)));
  CHECK(flow_derivative(1, 0.2) == doctest::Approx(std::exp(0.2)));
}

TEST_CASE("birkhoff sums") {
  auto F = kan(0.3);
  auto fixed = torus::orbit_of(kCat, pt(0, 0, 1));
  auto b = birkhoff_sum(F, fixed, 0);
  CHECK(b.S == doctest::Approx(std::log(1.3)).epsilon(1e-15));
  CHECK(b.lambda_c > 0);
  auto two = period_two();
  REQUIRE(two.period() == 2);
  const double c = -(1 + std::sqrt(5.0)) / 4;  // cos 144 = cos 216
  auto b2 = birkhoff_sum(F, two, 0);
  CHECK(b2.S == doctest::Approx(2 * std::log(1 + 0.3 * c)).epsilon(1e-14));
  CHECK(b2.S < 0);
  CHECK(birkhoff_sum(F, two, 1).S == doctest::Approx(2 * std::log(1 - 0.3 * c)).epsilon(1e-14));
  CHECK(birkhoff_sum(kan(0), two, 0).S == 0.0);
  // orbit invariance, exact equality over every rotation
  for (const auto& o : torus::periodic_points(kCat, 6))
    for (int bd : {0, 1}) {
      const double S = birkhoff_sum(F, o, bd).S;
      for (std::size_t r = 1; r < o.period(); ++r) {
        auto rot = torus::orbit_of(kCat, o.at(long(r)));
        CHECK(birkhoff_sum(F, rot, bd).S == S);
      }
    }
}

TEST_CASE("mostly contracting quadrature") {
  const double closed = std::log((1 + std::sqrt(0.91)) / 2);
  auto F = kan(0.3);
  auto q0 = mostly_contracting_check(F, 0);
  CHECK(std::abs(q0.value - closed) < 1e-12);
  CHECK(q0.sign == -1);
  CHECK(q0.error < 1e-12);
  auto q1 = mostly_contracting_check(F, 1);
  CHECK(std::abs(q1.value - closed) < 1e-12);
  try {
    mostly_contracting_check(kan(0), 0);
    FAIL("expected InconclusiveSign");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InconclusiveSign);
  }
  CHECK(boundary_exponent_integral(kan(0), 0).value == 0.0);
  // two-term psi: integral of ln(1 + a cos u + b cos v) by an independent 1-d reduction is hard; check vs fine grid
  KanFamilyParams p;
  p.epsilon = 0.4;
  p.psi = {{{1, 0}, 0.5, 0}, {{1, 1}, 0, 0.5}};
  SkewProduct G(kCat, FiberFamily::kan(p));
  auto coarse = boundary_exponent_integral(G, 0, 16), fine = boundary_exponent_integral(G, 0, 128);
  CHECK(std::abs(coarse.value - fine.value) <= coarse.error + 1e-14);
}

TEST_CASE("holder estimate") {
  auto F = kan(0.3);
  auto h = holder_estimate(F.fiber(), 2);
  CHECK(h.C_phi == doctest::Approx(2 * std::numbers::pi * 0.3 / 0.7));
  CHECK(h.theta == 1);
  CHECK(holder_sample_ratio(F.fiber(), 2, h, 20000, 5) <= 1.0);
  CHECK(holder_estimate(kan(0).fiber(), 2).C_phi == 1.0);
}

TEST_CASE("boundary conjugacy") {
  auto F = kan(0.3);
  std::uint64_t s = 3;
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd x(2);
    x << uniform01(s), uniform01(s);
    for (double t : {0.0, 1.0}) {
      auto [y, u] = F.apply(x, t);
      CHECK(u == doctest::Approx(t).epsilon(1e-15));
      CHECK(torus::torus_distance(y, torus::reduce_mod1(kCat.matrix_d() * x)) < 1e-14);
    }
  }
}

TEST_CASE("boundary interconnection") {
  auto res = boundary_interconnection(kan(0.3));
  REQUIRE(res.found());
  const auto& w = *res.witness;
  auto two = torus::canonical(period_two());
  CHECK(w.p0().orbit == two);
  CHECK(w.p0().boundary == 0);
  CHECK(w.p0().sum.lambda_c < 0);
  CHECK(w.p1().orbit == two);
  CHECK(w.p1().boundary == 1);
  CHECK(w.p1().sum.lambda_c > 0);
  CHECK(w.q0().orbit.period() == 1);
  CHECK(w.q0().boundary == 0);
  CHECK(w.q0().sum.lambda_c > 0);
  CHECK(w.q1().orbit.period() == 1);
  CHECK(w.q1().boundary == 1);
  CHECK(w.q1().sum.lambda_c < 0);
  CHECK(w.p_pair.overlap.length() > 1e-4);
  CHECK(w.q_pair.overlap.length() > 1e-4);
  CHECK(w.p_pair.tail_bound < 1e-12);

  auto none = boundary_interconnection(kan(0));
  CHECK_FALSE(none.found());
  CHECK_FALSE(none.absent_reason.empty());

  KanFamilyParams p;
  p.epsilon = 0.3;
  p.psi = {{{0, 0}, 1, 0}};
  auto constant = boundary_interconnection(SkewProduct(kCat, FiberFamily::kan(p)));
  CHECK_FALSE(constant.found());
}

TEST_CASE("fiber traces with an interior repeller") {
  // t - 0.1 sin(2 pi t) / (2 pi): sinks at 0 and 1, source at 1/2, independent of x
  const double k = 0.1 / (2 * std::numbers::pi);
  auto fam = FiberFamily::custom(
      "bistable", [k](Point, double t) { return t - k * std::sin(2 * std::numbers::pi * t); },
      [](Point, double t) { return 1 - 0.1 * std::cos(2 * std::numbers::pi * t); });
  SkewProduct F(kCat, fam);
  auto fixed = torus::orbit_of(kCat, pt(0, 0, 1));
  BoundaryExponent c{fixed, 0, birkhoff_sum(F, fixed, 0)}, e{fixed, 1, birkhoff_sum(F, fixed, 1)};
  CHECK(c.sum.lambda_c == doctest::Approx(std::log(0.9)));
  auto ov = fiber_overlap(F, c, e, InterconnectionOptions{});
  CHECK(ov.stable_trace.lo == 0.0);
  CHECK(std::abs(ov.stable_trace.hi - 0.5) < 1e-6);
  CHECK(ov.unstable_trace.lo > 0.5);
  CHECK(ov.overlap.length() == 0.0);
  CHECK_FALSE(boundary_interconnection(F).found());
}

TEST_CASE("unstable holonomy") {
  auto F = kan(0.3);
  auto x = pt(0, 0, 1);
  auto id = unstable_holonomy_fiber(F, x, x);
  for (int i = 0; i <= 10; ++i) CHECK(id.map(i / 10.0) == doctest::Approx(i / 10.0).epsilon(1e-14));

  const auto& sp = kCat.splitting();
  Eigen::VectorXd u = sp.unstable_basis[0].normalized() * 0.01;
  auto y = TorusPoint::numeric(torus::reduce_mod1(u));
  auto trivial = unstable_holonomy_fiber(kan(0), x, y);
  for (int i = 0; i <= 10; ++i) CHECK(trivial.map(i / 10.0) == doctest::Approx(i / 10.0).epsilon(1e-15));

  auto h = unstable_holonomy_fiber(F, x, y, 60);
  CHECK(h.derivative_gap < 1e-6);
  CHECK(h.cauchy < 1e-10);
  CHECK(std::abs(h.map.derivative(0) - 1) < 0.1);
  CHECK(std::abs(h.map.derivative(0) - 1) > 0);
  auto back = unstable_holonomy_fiber(F, y, x, 60);
  for (int i = 0; i <= 50; ++i) {
    const double t = i / 50.0;
    CHECK(std::abs(back.map(h.map(t)) - t) < 1e-8);
    CHECK(std::abs(h.map.inverse(h.map(t)) - t) < 1e-12);
  }
  for (int i = 1; i < 50; ++i) {
    const double t = i / 50.0, e = 1e-6;
    CHECK(h.map.derivative(t) == doctest::Approx((h.map(t + e) - h.map(t - e)) / (2 * e)).epsilon(1e-6));
  }
  // not on one unstable leaf
  Eigen::VectorXd s = sp.stable_basis[0].normalized() * 0.01;
  CHECK_THROWS_AS(unstable_holonomy_fiber(F, x, TorusPoint::numeric(torus::reduce_mod1(s))), Error);
  try {
    unstable_holonomy_fiber(F, x, y, 2);
    FAIL("expected NoConvergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoConvergence);
  }
}

TEST_CASE("central twist") {
  auto two = period_two();
  auto zero = central_twist_decay(kan(0), two);
  CHECK(zero.twist_free);
  for (double d : zero.d) CHECK(d == 0.0);

  auto r = central_twist_decay(kan(0.3), two);
  CHECK_FALSE(r.twist_free);
  CHECK(r.lambda_p < r.lambda_c);
  CHECK(r.lambda_c < 0);
  const double ls = 2 * std::log(1 / (kPhi * kPhi)), lu = -ls;
  CHECK(r.lambda_s == doctest::Approx(ls));
  CHECK(r.lambda_p == doctest::Approx((lu - r.lambda_c) / (lu - ls) * ls));
  CHECK(r.slope <= r.lambda_p + 0.05);
  CHECK(std::isfinite(r.max_excess));
  for (long n = r.n_lo; n <= r.n_hi; ++n) CHECK(r.ln_d[n] - n * r.lambda_p <= r.max_excess);

  auto fixed = torus::orbit_of(kCat, pt(0, 0, 1));
  CHECK_THROWS_AS(central_twist_decay(kan(0.3), fixed), Error);
}

TEST_CASE("perturb flow") {
  auto F = kan(0.3);
  auto same = perturb_flow(F, 0);
  for (const auto& s : same.shifts) CHECK(s.lambda_G == s.lambda_F);
  std::vector<double> x{0.3, 0.7};
  CHECK(same.G.fiber()(x, 0.4) == F.fiber()(x, 0.4));

  auto fixed = torus::orbit_of(kCat, pt(0, 0, 1));
  auto g = perturb_flow(F, 0.05, {fixed});
  CHECK(std::abs(birkhoff_sum(g.G, fixed, 0).lambda_c - (std::log(1.3) - 0.05)) < 1e-12);

  auto orbits = torus::periodic_orbits_up_to(kCat, 5);
  for (double tau : {0.01, 0.05, 0.2}) {
    auto r = perturb_flow(F, tau, orbits);
    for (const auto& s : r.shifts) CHECK(std::abs(s.lambda_G - s.lambda_F - (s.boundary == 0 ? -tau : tau)) < 1e-9);
    // additivity
    auto r2 = perturb_flow(perturb_flow(F, tau / 3).G, 2 * tau / 3, orbits);
    for (std::size_t i = 0; i < r.shifts.size(); ++i)
      CHECK(std::abs(r2.shifts[i].lambda_G - r.shifts[i].lambda_G) < 1e-9);
  }

  auto big = perturb_flow(F, 0.3);
  for (const auto& e : periodic_exponents(big.G, 0, 8)) CHECK(e.sum.lambda_c < 0);
  auto res = boundary_interconnection(big.G);
  CHECK_FALSE(res.found());

  CHECK_THROWS_AS(perturb_flow(F, 3.0), Error);
}

TEST_CASE("consequence of non-positive periodic exponents") {
  auto G = perturb_flow(kan(0.3), 0.3).G;
  auto r = corollary_average_check(G, 0, 6, 1000, 100000, 11);
  CHECK(r.hypothesis);
  CHECK(r.max_average <= 0.01);
  auto F = kan(0.3);
  CHECK_FALSE(corollary_average_check(F, 0, 2, 1, 10, 1).hypothesis);
}

TEST_CASE("lattice orbits are exact") {
  std::uint64_t s = 9;
  auto o = LatticeOrbit::random(kCat, s);
  auto start = std::vector<double>(o.coords().begin(), o.coords().end());
  Eigen::VectorXd x(2);
  x << start[0], start[1];
  for (int i = 0; i < 20; ++i) {
    o.step();
    x = torus::reduce_mod1(kCat.matrix_d() * x);
  }
  // double iteration drifts by lambda_u^20 ulp; the lattice orbit is exact
  Eigen::VectorXd y(2);
  y << o.coords()[0], o.coords()[1];
  CHECK(torus::torus_distance(x, y) < 1e-3);
  // the fixed point stays fixed
  auto z = LatticeOrbit(kCat, {0, 0});
  z.step();
  CHECK(z.coords()[0] == 0.0);
}
