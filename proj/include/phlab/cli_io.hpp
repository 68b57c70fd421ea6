#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "phlab/experiments.hpp"

namespace phlab::io {

using experiments::SkewProduct;
using skew::PeriodicOrbit;

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

// Experiment names in canonical order; also the CLI subcommands that run one experiment.
const std::vector<std::string>& experiment_names();

struct SystemSpec {
  std::vector<std::vector<long long>> matrix{{2, 1}, {1, 1}};
  double epsilon = 0.3;
  std::vector<skew::TrigTerm> psi;  // empty: cos(2 pi x_1)
  double flow_tau = 0;
  bool operator==(const SystemSpec&) const = default;
};

struct Caps {
  unsigned period_cap = 6;  // exponents table and density pool
  unsigned interconnect_period_cap = 2;
  double density_R = 1;
  double density_eps = 0.1;
  int density_bins = 40;
  int ari_m = 4;
  unsigned ari_pool_period_cap = 10;
  double perturb_tau = 0.5;
  long horseshoe_iterations = 10000;
  long horseshoe_range = 50;
  bool operator==(const Caps&) const = default;
};

struct CounterexampleSpec {
  double alpha = 0.5;  // Phi(t) = alpha t / (1 - (1 - alpha) t)
  fiber::ClosedInterval U{0.823, 0.85}, V{0.86, 0.895};
  bool operator==(const CounterexampleSpec&) const = default;
};

struct RunConfig {
  SystemSpec system;
  std::vector<std::string> experiments;
  experiments::GridSpec grid;  // seed and threads come from the fields below
  Caps caps;
  CounterexampleSpec counterexample;
  std::vector<std::string> ari_p0, ari_q0;  // exact base points, empty: chosen from periods <= 2
  std::uint64_t seed = 1;
  int threads = 1;
  std::string output = "out";

  experiments::GridSpec effective_grid() const;
  bool operator==(const RunConfig&) const = default;
};

// Throws ConfigInvalid with the offending field path.
RunConfig config_from_json(const Json& j);
Json config_to_json(const RunConfig& c);
RunConfig load_config(const std::filesystem::path& p);
// Structural checks plus construction of the system (domination surfaces as ConfigInvalid).
void validate(const RunConfig& c);
SkewProduct build_system(const RunConfig& c);

std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);
// Over the canonical JSON without output and threads.
std::string config_hash(const RunConfig& c);

std::string describe(const RunConfig& c);

struct ExperimentRecord {
  std::string name;
  std::string status;  // ok or error
  std::string error;
  double seconds = 0;
  std::vector<std::string> files;
};

struct RunResult {
  int exit_code = 0;
  std::vector<ExperimentRecord> records;
  std::filesystem::path manifest;
};

// Runs the selected experiments in order into c.output. Stops at the first failure after writing the manifest.
RunResult run(const RunConfig& c);

// Report of a single experiment as JSON plus side files (name, contents).
struct Report {
  Json json;
  std::vector<std::pair<std::string, std::string>> side_files;
};
Report run_experiment(const std::string& name, const RunConfig& c, const SkewProduct& F);

// PHLAB_LOG: 0 quiet, 1 info (default), 2 debug.
int log_level();
void log(int level, const std::string& msg);

}  // namespace phlab::io
