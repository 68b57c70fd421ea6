#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phlab/fiber.hpp"
#include "phlab/torus.hpp"

namespace phlab::skew {

using torus::PeriodicOrbit;
using torus::ToralAutomorphism;
using torus::TorusPoint;
using Point = std::span<const double>;

// c cos(2 pi k.x) + s sin(2 pi k.x)
struct TrigTerm {
  std::vector<int> k;
  double c = 0, s = 0;
  bool operator==(const TrigTerm&) const = default;
};

struct KanFamilyParams {
  double epsilon = 0.3;
  std::vector<TrigTerm> psi;

  // psi(x) = cos(2 pi x_1)
  static KanFamilyParams standard(std::size_t d, double epsilon = 0.3);
  double coefficient_sum() const;
  bool operator==(const KanFamilyParams&) const = default;
};

// Explicit flow of s' = s(s - 1).
double flow(double s, double tau);
double flow_derivative(double s, double tau);

// phi(x, t) = Phi_tau(t + eps t(1-t) psi(x)) for Kan families.
class FiberFamily {
 public:
  using Fn = std::function<double(Point, double)>;

  static FiberFamily kan(KanFamilyParams p);
  // dphi must be positive; inverse optional (bisection fallback).
  static FiberFamily custom(std::string name, Fn phi, Fn dphi, Fn inverse = {});

  double operator()(Point x, double t) const;
  double dt(Point x, double t) const;
  double log_dt(Point x, double t) const;
  double inverse(Point x, double u) const;

  bool is_kan() const { return kan_.has_value(); }
  const KanFamilyParams& kan_params() const;
  double psi(Point x) const;
  double flow_tau() const { return tau_; }
  FiberFamily with_flow(double tau) const;
  std::string descriptor() const;
  std::string smoothness() const { return is_kan() ? "C-infinity" : "C2"; }

 private:
  std::optional<KanFamilyParams> kan_;
  std::string name_;
  Fn phi_, dphi_, inv_;
  double tau_ = 0;
  double base(Point x, double t) const;
  double base_log_dt(Point x, double t) const;
  double base_inverse(Point x, double u) const;
};

struct HolderEstimate {
  double C_phi = 1;
  double theta = 1;
};

// Analytic bound for Kan families, sampled estimate otherwise.
HolderEstimate holder_estimate(const FiberFamily& f, std::size_t d);
// max |ln dphi(x,b) - ln dphi(y,b)| / (C d(x,y)^theta) over random pairs.
double holder_sample_ratio(const FiberFamily& f, std::size_t d, const HolderEstimate& h, int pairs,
                           std::uint64_t seed);

struct DominationMargins {
  double stable = 0;    // inf dphi - ||A|Ls||
  double unstable = 0;  // m(A|Lu) - sup dphi
  double inf_dt = 0, sup_dt = 0;
  bool center_bunched = true;
  std::size_t grid_points = 0;
};

// Grid of max(64, res)^d base points times (res + 1) fiber points.
DominationMargins check_domination(const ToralAutomorphism& A, const FiberFamily& f, int res = 64);

class SkewProduct {
 public:
  // Runs check_domination; throws DominationViolated.
  SkewProduct(ToralAutomorphism base, FiberFamily fiber);

  const ToralAutomorphism& base() const { return base_; }
  const FiberFamily& fiber() const { return fiber_; }
  const DominationMargins& margins() const { return margins_; }
  std::size_t dimension() const { return base_.dimension(); }

  // One step; the base point is reduced mod 1.
  void step(Eigen::VectorXd& x, double& t) const;
  std::pair<Eigen::VectorXd, double> apply(const Eigen::VectorXd& x, double t) const;

 private:
  ToralAutomorphism base_;
  FiberFamily fiber_;
  DominationMargins margins_;
};

inline DominationMargins check_domination(const SkewProduct& F) { return F.margins(); }

// Neumaier summation over the terms sorted ascending.
double stable_sum(std::vector<double> terms);

struct BirkhoffSum {
  double S = 0;
  double lambda_c = 0;
  std::size_t period = 0;
};
BirkhoffSum birkhoff_sum(const SkewProduct& F, const PeriodicOrbit& orbit, int boundary);

struct BoundaryExponent {
  PeriodicOrbit orbit;
  int boundary = 0;
  BirkhoffSum sum;
};
std::vector<BoundaryExponent> periodic_exponents(const SkewProduct& F, int boundary, unsigned period_cap);

struct QuadratureResult {
  double value = 0;
  double error = 0;
  int sign = 0;
  int resolution = 0;
};
// Periodic trapezoid rule on res^d and (2 res)^d grids; throws InconclusiveSign.
QuadratureResult mostly_contracting_check(const SkewProduct& F, int boundary, int res = 64);
// Same computation, no throw.
QuadratureResult boundary_exponent_integral(const SkewProduct& F, int boundary, int res = 64);

struct InterconnectionOptions {
  unsigned period_cap = 2;
  double min_overlap = 1e-6;
  double heteroclinic_bound = 3;
  double unstable_width = 1e-3;
  double tail_tol = 1e-12;
  long min_backward = 200;
  long max_backward = 2000;
  long max_forward = 20000;
  double enter_threshold = 1e-4;
  double stay_threshold = 1e-3;
  long stay_steps = 100;
  double bisection_tol = 1e-12;
};

struct FiberOverlap {
  BoundaryExponent contracting;  // W^s side
  BoundaryExponent expanding;    // W^u side
  torus::HeteroclinicPoint z;
  fiber::ClosedInterval stable_trace, unstable_trace, overlap;
  long backward_steps = 0;
  double tail_bound = 0;
  bool thin = false;  // positive but below min_overlap
};

struct InterconnectionWitness {
  // p0 on M_0 and p1 on M_1 with W^s(p0) meeting W^u(p1), likewise q1 and q0.
  FiberOverlap p_pair, q_pair;
  const BoundaryExponent& p0() const { return p_pair.contracting; }
  const BoundaryExponent& p1() const { return p_pair.expanding; }
  const BoundaryExponent& q1() const { return q_pair.contracting; }
  const BoundaryExponent& q0() const { return q_pair.expanding; }
};

struct InterconnectionResult {
  std::optional<InterconnectionWitness> witness;
  std::string absent_reason;
  std::size_t candidates_tried = 0;
  bool thin_overlap_seen = false;
  bool found() const { return witness.has_value(); }
};

InterconnectionResult boundary_interconnection(const SkewProduct& F, const InterconnectionOptions& opt = {});

// Fiber traces over z: W^s of the contracting boundary orbit and W^u of the expanding one.
FiberOverlap fiber_overlap(const SkewProduct& F, const BoundaryExponent& contracting,
                           const BoundaryExponent& expanding, const InterconnectionOptions& opt);

struct HolonomyResult {
  fiber::IntervalMap map = fiber::IntervalMap::identity();
  long N = 0;
  double cauchy = 0;       // sup over the t-grid, N vs N+10
  double derivative_gap = 0;  // at t = 0, N vs N+10
};

// Throws NotSameLeaf, NoConvergence.
HolonomyResult unstable_holonomy_fiber(const SkewProduct& F, const TorusPoint& x, const TorusPoint& y, long N = 60,
                                       double leaf_distance = 1.0, double tol = 1e-10);

struct TwistReport {
  std::vector<double> ln_d;  // ln d_n, -inf where d_n = 0
  std::vector<double> d;
  long n_lo = 10, n_hi = 40;
  double slope = 0;
  double lambda_s = 0, lambda_c = 0, lambda_u = 0;  // per return
  double lambda_p = 0;
  double max_excess = 0;  // max over the fit window of ln d_n - n lambda_p
  bool twist_free = false;  // all d_n vanish
};

// d = 2 and Kan families only.
TwistReport central_twist_decay(const SkewProduct& F, const PeriodicOrbit& p, double r_distance = 0.1,
                                long n_max = 40, long n_lo = 10, double a0 = 0.05, double t0 = 0.2);

struct ExponentShift {
  PeriodicOrbit orbit;
  int boundary = 0;
  double lambda_F = 0, lambda_G = 0;
};

struct PerturbResult {
  SkewProduct G;
  std::vector<ExponentShift> shifts;
  double alpha = 1;  // e^-tau
};

// G = Phi_tau o F; shifts over the given orbits, or all orbits of period <= 3.
PerturbResult perturb_flow(const SkewProduct& F, double tau, const std::vector<PeriodicOrbit>& tested = {});

// Exact orbits on the 2^-62 lattice.
class LatticeOrbit {
 public:
  LatticeOrbit(const ToralAutomorphism& A, std::vector<std::uint64_t> start);
  static LatticeOrbit random(const ToralAutomorphism& A, std::uint64_t& state);
  static LatticeOrbit from_point(const ToralAutomorphism& A, const Eigen::VectorXd& x);
  void step();
  std::span<const double> coords() const { return xd_; }

 private:
  std::vector<std::int64_t> a_;
  std::vector<std::uint64_t> x_, tmp_;
  std::vector<double> xd_;
  std::size_t d_;
  void refresh();
};

std::uint64_t splitmix64(std::uint64_t& state);
double uniform01(std::uint64_t& state);

struct BirkhoffAverageCheck {
  bool hypothesis = false;  // all periodic exponents <= 0 up to the cap
  double max_average = 0;
  std::size_t orbits = 0;
  long iterations = 0;
};
BirkhoffAverageCheck corollary_average_check(const SkewProduct& F, int boundary, unsigned period_cap,
                                             std::size_t orbits, long iterations, std::uint64_t seed);

}  // namespace phlab::skew
