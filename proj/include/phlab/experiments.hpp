#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phlab/error.hpp"
#include "phlab/fiber.hpp"
#include "phlab/skew.hpp"

namespace phlab::experiments {

using skew::PeriodicOrbit;
using skew::SkewProduct;

struct GridSpec {
  int base_subdivisions = 16;  // per axis
  int fiber_subdivisions = 8;
  long iterations = 10'000'000;
  std::uint64_t seed = 1;
  double theta0 = 0.05;
  double trailing_fraction = 0.1;
  int samples_per_cell = 100;
  int cloud_size = 1000;
  int reach_samples = 32;
  int threads = 1;

  void validate() const;  // ConfigInvalid
  bool operator==(const GridSpec&) const = default;
};

// cell index: ((i_1 * b + i_2) ... ) * f + layer
std::size_t cell_count(const GridSpec& g, std::size_t d);
std::size_t cell_of(const GridSpec& g, std::span<const double> x, double t);

struct CoverageReport {
  GridSpec grid;
  std::size_t cells = 0;
  std::size_t visited = 0;
  double visited_fraction = 0;      // union of F^n(U), n >= 1, over a small seeded box U
  double single_orbit_fraction = 0;  // one orbit from the box centre for the whole budget
  long steps_per_point = 0;
  std::vector<double> box_center;
  double box_t = 0, box_half_width = 0;
  std::vector<long> first_hit;  // -1 when never hit
  long first_hit_max = -1;
  double first_hit_median = 0;
  std::size_t reach_edges = 0;
  std::size_t visited_components = 0;  // strongly connected components among visited cells
  bool strongly_connected = false;
  std::string note;
};

CoverageReport transitivity_probe(const SkewProduct& F, const GridSpec& grid);

struct CellCounts {
  long b0 = 0, b1 = 0, unresolved = 0;
  long total() const { return b0 + b1 + unresolved; }
};

struct BasinReport {
  GridSpec grid;
  std::vector<CellCounts> cells;
  long samples = 0;
  long b0 = 0, b1 = 0, unresolved = 0;
  double union_fraction = 0;           // classified / samples
  double min_b0_fraction = 0, min_b1_fraction = 0;  // over cells
  double b0_fraction = 0, b1_fraction = 0;
  double b0_stderr = 0, b1_stderr = 0;
  // samples with initial t in [theta0, 1 - theta0]
  long interior_samples = 0, interior_b0 = 0, interior_b1 = 0, interior_unresolved = 0;
  long early_stops = 0;  // orbits absorbed exactly at a boundary
};

// Throws NotMostlyContracting unless both boundary integrals are negative (when required).
BasinReport intermingled_basins_scan(const SkewProduct& F, const GridSpec& grid,
                                     bool require_mostly_contracting = true);
// One P5 image per fiber layer; gray = fraction of the basin (0 or 1) in the cell.
std::string basin_pgm(const BasinReport& r, int layer, int basin);

struct DensityReport {
  int boundary = 0;
  unsigned period_cap = 0;
  double R = 1, eps = 0.1;
  std::size_t orbits = 0;
  double min_S = 0, max_S = 0;
  std::size_t negative = 0, positive = 0;
  std::size_t in_window = 0;
  double covering_radius = 0;  // sup over the window of the distance to the nearest sum
  bool dense = false;
  std::vector<double> bin_edges;
  std::vector<std::size_t> histogram;
  std::vector<skew::BoundaryExponent> pool;
};

// Throws HypothesisUnmet when all sums share a sign.
DensityReport birkhoff_density_scan(const SkewProduct& F, int boundary, unsigned period_cap, double R, double eps,
                                    int bins = 40);

struct PlissResult {
  std::size_t shift = 0;
  PeriodicOrbit rotated;
  double lambda_c = 0;
  double target = 0;
  std::vector<double> partial_averages;  // k = 1..period from the rotated base
  double center_size = 0;   // measured sup s with averages <= target/2 on [0, s]
  double center_bound = 0;  // [-(target/2)(1 - e^(theta target/2)) / C_phi]^(1/theta)
  bool bound_holds = false;
};

// target_rate NaN picks lambda^c / 3; boundary 0.
PlissResult pliss_reindex(const SkewProduct& F, const PeriodicOrbit& orbit, double target_rate);

struct AriStep {
  int m = 0;
  PeriodicOrbit pbar;
  double S_pbar = 0;
  long K = 0, L = 0;
  long K0 = 0, K1 = 0, L0 = 0, L1 = 0;
  double eps_bar = 0;
  double jump = 0;  // largest pseudo-orbit jump
  std::size_t period_prime = 0, period_double = 0;
  double S_prime = 0, S_double = 0;
  double shadow_error = 0;
  bool exact_periodic = false;
  double sandwich = 0;  // |S'' - S' - S(p0)|
  bool sandwich_holds = false;
  std::string chosen;   // "prime" or "double"
  double S_pm = 0;
  double lambda_pm = 0;
  double independence = 0;  // (S(p_m), S(q0)) at the Dirichlet bound for eps_bar
  long independence_K = 0;
  double drift = 0;
  double P = 0;            // S(P') - 2K lambda(pbar) - 2L lambda(p0)
  double drift_bound = 0;  // (|P| + eps_bar + 2K |lambda(pbar) - lambda(p0)| + C eps_bar) / (2K + 2L)
  bool pliss_applicable = false;  // lambda^c(p_m) < lambda^c(p0) / 3
  double center_size = 0, center_bound = 0;
  std::size_t pliss_shift = 0;
};

struct AriReport {
  PeriodicOrbit p0, q0;
  double S_p0 = 0, S_q0 = 0;
  double C = 0;
  unsigned pool_period_cap = 0;
  std::size_t pool_size = 0;
  std::vector<AriStep> steps;
  int achieved_m = 0;
  bool monotone_independence = false;
  bool monotone_drift = false;
  bool all_sandwiches = false;
};

class CandidateExhausted : public Error {
 public:
  explicit CandidateExhausted(AriReport partial);
  const AriReport& partial() const { return partial_; }

 private:
  AriReport partial_;
};

// pool empty: orbits of period <= pool_period_cap on M_0.
AriReport ari_sequence_build(const SkewProduct& F, const PeriodicOrbit& p0, const PeriodicOrbit& q0, int m_max,
                             unsigned pool_period_cap = 10, std::vector<PeriodicOrbit> pool = {});

struct HorseshoeReport {
  double lambda_p0 = 0, lambda_p1 = 0, lambda_q0 = 0, lambda_q1 = 0;
  bool sign_pattern = false;
  fiber::ClosedInterval U, V;
  long separation_range = 0;
  double min_separation = 0;  // smallest gap between Phi^n(U) and V over the range
  long iterations = 0;
  long orbits = 0;
  int word_length = 0;
  long violations = 0;  // samples from U inside V or from V inside U
  long max_excursion = 0;  // largest |n| with t = Phi^n(t0)
};

// Full 2-shift base, fiber Phi on symbol 0 and Phi^-1 on symbol 1. Throws IntervalsNotSeparated.
HorseshoeReport horseshoe_counterexample_demo(const fiber::IntervalMap& Phi, const fiber::ClosedInterval& U,
                                              const fiber::ClosedInterval& V, long range = 50,
                                              long iterations = 10'000, std::uint64_t seed = 1,
                                              int word_length = 40);

}  // namespace phlab::experiments
