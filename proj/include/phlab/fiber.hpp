#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phlab/error.hpp"

namespace phlab::fiber {

struct ClosedInterval {
  double lo = 0, hi = 0;
  double length() const { return hi - lo; }
  bool contains(double t) const { return lo <= t && t <= hi; }
  bool operator==(const ClosedInterval&) const = default;
};

// Overlap of two intervals, empty when the length would be negative.
std::optional<ClosedInterval> intersect(const ClosedInterval& a, const ClosedInterval& b);
double overlap_length(const ClosedInterval& a, const ClosedInterval& b);

enum class Smoothness { C1, C1Holder };

// Hölder data for ln f'.
struct HolderData {
  double C = 1;
  double theta = 1;
  bool supplied = false;
};

class IntervalMap {
 public:
  using Fn = std::function<double(double)>;

  IntervalMap(std::string name, Fn f, Fn df, Fn inv = {}, bool boundary_preserving = true);

  double operator()(double t) const { return f_(t); }
  double derivative(double t) const { return df_(t); }
  // Closed form when available, otherwise bisection on [0,1].
  double inverse(double y) const;
  // n < 0 uses the inverse.
  double iterate(double t, long n) const;
  ClosedInterval image(const ClosedInterval& I, long n = 1) const;

  const std::string& name() const { return name_; }
  bool boundary_preserving() const { return boundary_preserving_; }
  Smoothness smoothness() const { return holder_.supplied ? Smoothness::C1Holder : Smoothness::C1; }
  const HolderData& holder() const { return holder_; }
  IntervalMap with_holder(HolderData h) const;

  // Throws PreconditionViolated on a failed boundary or monotonicity check.
  void check(int grid = 1024) const;

  static IntervalMap identity();
  static IntervalMap linear(double slope);
  // c0 + c1 t + c2 t^2 + ...
  static IntervalMap polynomial(std::vector<double> coeffs);
  // alpha t / (1 - (1 - alpha) t)
  static IntervalMap mobius(double alpha);
  // alpha t + (1 - alpha) t^(m+1)
  static IntervalMap power(double alpha, int m);
  static IntervalMap compose(const IntervalMap& outer, const IntervalMap& inner);
  // u -> f(s u) / s
  static IntervalMap rescaled(const IntervalMap& f, double s);

 private:
  std::string name_;
  Fn f_, df_, inv_;
  bool boundary_preserving_;
  HolderData holder_;
};

// Lipschitz-type estimate of ln f' over [lo, hi] from pairwise samples (theta = 1 unless given).
HolderData estimate_holder(const IntervalMap& f, double lo, double hi, double theta = 1.0, int samples = 200);

struct NSMapModel {
  double alpha = 0;
  double smallest_fixed = 1;
  ClosedInterval contracting_interval;  // [0, s_p]
  bool pinned = false;                  // no fixed point in (0,1]; s_p pinned at 1
  IntervalMap rescaled = IntervalMap::identity();
};

NSMapModel ns_analyze(const IntervalMap& f);

struct IndependenceValue {
  double value = 0;
  long k = 0, l = 0;
  bool rational_shortcut = false;
};

IndependenceValue rational_independence_detail(double a, double b, long K);
double rational_independence(double a, double b, long K);
// A K for which the enumeration attains a value below eps whenever one exists (Dirichlet).
long dirichlet_bound(double a, double b, double eps);

struct DensityCheck {
  bool dense = false;
  double max_gap = 0;
  std::size_t steps = 0;
  bool truncated = false;
  double independence = 0;
};
DensityCheck rotation_density_detail(double a, double b, double eps);
bool rotation_density_check(double a, double b, double eps);

double select_independent(double a1, double a2, double b, double eps);

struct ThresholdAnalysis {
  double epsilon = 0;
  double alpha = 0, beta = 0, gamma = 0;
  double independence = 0;      // (ln alpha, ln beta) at the Dirichlet bound
  bool independent = false;     // independence < epsilon
  double delta = 0;             // linearisation radius
  ClosedInterval D0;            // (g(h(delta)), h(delta)]
  double D = 0;                 // sup |I_t|
  HolderData holder;
  double rho = 0;               // exp(-C^2 h(delta)^theta / (1 - beta^theta))
  double eps2 = 0;              // rho^-1 3 eps / (1 - beta - eps) D
  double G = 0;                 // G(eps2) with inflation
  double L = 0;                 // with the full map g
  double L_local = 0;           // iterates kept inside [0, h(delta)], depends on beta only
  bool L_discrepancy = false;
};

ThresholdAnalysis analyze_threshold(const IntervalMap& f, const IntervalMap& g, const IntervalMap& h, double epsilon);

struct SearchBudget {
  double epsilon = 0.01;
  long k_max = 200;
  long l_max = 200;
  std::size_t n_min = 10;
};

struct IntersectionPair {
  long k = 0, l = 0;
  ClosedInterval overlap;
};

struct IntersectionCertificate {
  std::vector<IntersectionPair> pairs;
  double c = 0;
  double sup_deviation = 0;  // sup |k ln alpha - l ln beta|
  double alpha = 0, beta = 0;
  ThresholdAnalysis threshold;
};

class SearchBudgetExhausted : public Error {
 public:
  explicit SearchBudgetExhausted(IntersectionCertificate partial);
  const IntersectionCertificate& partial() const { return partial_; }

 private:
  IntersectionCertificate partial_;
};

// Throws ThresholdNotMet, or SearchBudgetExhausted carrying the partial certificate.
IntersectionCertificate center_intersection_search(const IntervalMap& f, const IntervalMap& g, const IntervalMap& h,
                                                   const ClosedInterval& I, const ClosedInterval& J,
                                                   const SearchBudget& budget);

struct OraclePair {
  long k = 0, l = 0;
  double overlap = 0;
};

std::vector<OraclePair> intersection_oracle(const IntervalMap& f, const IntervalMap& g, const IntervalMap& h,
                                            const ClosedInterval& I, const ClosedInterval& J, long K_max, long L_max);

struct ProportionReport {
  double min_ratio = 0, max_ratio = 0;
  double rho_hat = 0;
  double rho_bound = 0;
  double C = 0, theta = 1;
  bool bound_holds = false;
  std::vector<double> ratios;
};

ProportionReport uniform_proportion_check(const IntervalMap& g, const ClosedInterval& J, double y, long i_lo,
                                          long i_hi, double neighborhood_hi);

}  // namespace phlab::fiber
