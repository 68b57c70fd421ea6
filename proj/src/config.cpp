#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "phlab/cli_io.hpp"

namespace phlab::io {

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::ConfigInvalid, path + ": " + msg);
}

// Reads an object and rejects keys outside the allowed set.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) invalid(path_, "expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      invalid(field(key), e.what());
    }
  }

  const Json* sub(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) invalid(field(it.key()), "unknown field");
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void positive(bool ok, const std::string& path) {
  if (!ok) invalid(path, "must be positive");
}

fiber::ClosedInterval interval(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    invalid(path, "expected [lo, hi]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"exponents",    "interconnect", "transitivity", "basins",
                                              "density",      "ari",          "perturb",      "counterexample"};
  return names;
}

experiments::GridSpec RunConfig::effective_grid() const {
  auto g = grid;
  g.seed = seed;
  g.threads = threads;
  return g;
}

RunConfig config_from_json(const Json& j) {
  RunConfig c;
  Reader top(j, "");
  if (const Json* s = top.sub("system")) {
    Reader r(*s, "system");
    r.get("matrix", c.system.matrix);
    r.get("epsilon", c.system.epsilon);
    r.get("flow_tau", c.system.flow_tau);
    if (const Json* p = r.sub("psi")) {
      if (!p->is_array()) invalid("system.psi", "expected an array");
      for (std::size_t i = 0; i < p->size(); ++i) {
        Reader t((*p)[i], "system.psi[" + std::to_string(i) + "]");
        skew::TrigTerm term;
        t.get("k", term.k);
        t.get("c", term.c);
        t.get("s", term.s);
        t.finish();
        if (term.k.empty()) invalid(t.field("k"), "missing frequency vector");
        c.system.psi.push_back(std::move(term));
      }
    }
    r.finish();
  }
  top.get("experiments", c.experiments);
  if (const Json* g = top.sub("grid")) {
    Reader r(*g, "grid");
    r.get("base_subdivisions", c.grid.base_subdivisions);
    r.get("fiber_subdivisions", c.grid.fiber_subdivisions);
    r.get("iterations", c.grid.iterations);
    r.get("theta0", c.grid.theta0);
    r.get("trailing_fraction", c.grid.trailing_fraction);
    r.get("samples_per_cell", c.grid.samples_per_cell);
    r.get("cloud_size", c.grid.cloud_size);
    r.get("reach_samples", c.grid.reach_samples);
    r.finish();
  }
  if (const Json* k = top.sub("caps")) {
    Reader r(*k, "caps");
    r.get("period_cap", c.caps.period_cap);
    r.get("interconnect_period_cap", c.caps.interconnect_period_cap);
    r.get("density_R", c.caps.density_R);
    r.get("density_eps", c.caps.density_eps);
    r.get("density_bins", c.caps.density_bins);
    r.get("ari_m", c.caps.ari_m);
    r.get("ari_pool_period_cap", c.caps.ari_pool_period_cap);
    r.get("perturb_tau", c.caps.perturb_tau);
    r.get("horseshoe_iterations", c.caps.horseshoe_iterations);
    r.get("horseshoe_range", c.caps.horseshoe_range);
    r.finish();
  }
  if (const Json* h = top.sub("counterexample")) {
    Reader r(*h, "counterexample");
    r.get("alpha", c.counterexample.alpha);
    if (const Json* u = r.sub("U")) c.counterexample.U = interval(*u, "counterexample.U");
    if (const Json* v = r.sub("V")) c.counterexample.V = interval(*v, "counterexample.V");
    r.finish();
  }
  if (const Json* a = top.sub("ari")) {
    Reader r(*a, "ari");
    r.get("p0", c.ari_p0);
    r.get("q0", c.ari_q0);
    r.finish();
  }
  top.get("seed", c.seed);
  top.get("threads", c.threads);
  top.get("output", c.output);
  top.finish();
  return c;
}

Json config_to_json(const RunConfig& c) {
  Json j;
  Json psi = Json::array();
  for (const auto& t : c.system.psi) psi.push_back({{"k", t.k}, {"c", t.c}, {"s", t.s}});
  j["system"] = {{"matrix", c.system.matrix}, {"epsilon", c.system.epsilon}, {"psi", psi},
                 {"flow_tau", c.system.flow_tau}};
  j["experiments"] = c.experiments;
  const auto& g = c.grid;
  j["grid"] = {{"base_subdivisions", g.base_subdivisions}, {"fiber_subdivisions", g.fiber_subdivisions},
               {"iterations", g.iterations},       {"theta0", g.theta0},
               {"trailing_fraction", g.trailing_fraction}, {"samples_per_cell", g.samples_per_cell},
               {"cloud_size", g.cloud_size},       {"reach_samples", g.reach_samples}};
  const auto& k = c.caps;
  j["caps"] = {{"period_cap", k.period_cap},
               {"interconnect_period_cap", k.interconnect_period_cap},
               {"density_R", k.density_R},
               {"density_eps", k.density_eps},
               {"density_bins", k.density_bins},
               {"ari_m", k.ari_m},
               {"ari_pool_period_cap", k.ari_pool_period_cap},
               {"perturb_tau", k.perturb_tau},
               {"horseshoe_iterations", k.horseshoe_iterations},
               {"horseshoe_range", k.horseshoe_range}};
  const auto& h = c.counterexample;
  j["counterexample"] = {{"alpha", h.alpha}, {"U", {h.U.lo, h.U.hi}}, {"V", {h.V.lo, h.V.hi}}};
  j["ari"] = {{"p0", c.ari_p0}, {"q0", c.ari_q0}};
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["output"] = c.output;
  return j;
}

RunConfig load_config(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + p.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    invalid(p.string(), e.what());
  }
  return config_from_json(j);
}

void validate(const RunConfig& c) {
  const auto& m = c.system.matrix;
  if (m.empty()) invalid("system.matrix", "empty");
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i].size() != m.size()) invalid("system.matrix[" + std::to_string(i) + "]", "matrix must be square");
  if (!(c.system.epsilon >= 0 && c.system.epsilon < 1)) invalid("system.epsilon", "must lie in [0, 1)");
  for (std::size_t i = 0; i < c.system.psi.size(); ++i)
    if (c.system.psi[i].k.size() != m.size())
      invalid("system.psi[" + std::to_string(i) + "].k", "length differs from the matrix dimension");
  if (!(c.system.flow_tau >= 0)) invalid("system.flow_tau", "must be nonnegative");

  const auto& names = experiment_names();
  for (std::size_t i = 0; i < c.experiments.size(); ++i)
    if (std::find(names.begin(), names.end(), c.experiments[i]) == names.end())
      invalid("experiments[" + std::to_string(i) + "]", "unknown experiment " + c.experiments[i]);

  c.effective_grid().validate();
  const auto& k = c.caps;
  positive(k.period_cap > 0, "caps.period_cap");
  positive(k.interconnect_period_cap > 0, "caps.interconnect_period_cap");
  positive(k.density_R > 0, "caps.density_R");
  positive(k.density_eps > 0, "caps.density_eps");
  positive(k.density_bins > 0, "caps.density_bins");
  positive(k.ari_m > 0, "caps.ari_m");
  positive(k.ari_pool_period_cap > 0, "caps.ari_pool_period_cap");
  positive(k.perturb_tau > 0, "caps.perturb_tau");
  positive(k.horseshoe_iterations > 0, "caps.horseshoe_iterations");
  positive(k.horseshoe_range > 0, "caps.horseshoe_range");
  positive(c.counterexample.alpha > 0 && c.counterexample.alpha < 1, "counterexample.alpha");
  positive(c.seed > 0, "seed");
  positive(c.threads > 0, "threads");
  for (const auto* pts : {&c.ari_p0, &c.ari_q0}) {
    const std::string path = pts == &c.ari_p0 ? "ari.p0" : "ari.q0";
    if (pts->empty()) continue;
    if (pts->size() != m.size()) invalid(path, "length differs from the matrix dimension");
    for (const auto& s : *pts) {
      try {
        Rational q(s);
        (void)q;
      } catch (const std::exception&) {
        invalid(path, "not a rational: " + s);
      }
    }
  }
  if (c.output.empty()) invalid("output", "empty");
  build_system(c);
}

SkewProduct build_system(const RunConfig& c) {
  try {
    const auto A = torus::validate_automorphism(c.system.matrix);
    auto p = skew::KanFamilyParams::standard(A.dimension(), c.system.epsilon);
    if (!c.system.psi.empty()) p.psi = c.system.psi;
    auto fam = skew::FiberFamily::kan(p);
    if (c.system.flow_tau != 0) fam = fam.with_flow(c.system.flow_tau);
    return SkewProduct(A, std::move(fam));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigInvalid) throw;
    throw Error(ErrorCode::ConfigInvalid, std::string("system: ") + e.what());
  }
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[std::size_t(i)] = digits[v & 15];
  return s;
}

std::string config_hash(const RunConfig& c) {
  Json j = config_to_json(c);
  j.erase("output");
  j.erase("threads");
  return hex64(fnv1a(j.dump()));
}

int log_level() {
  const char* v = std::getenv("PHLAB_LOG");
  if (!v || !*v) return 1;
  return std::atoi(v);
}

void log(int level, const std::string& msg) {
  if (level <= log_level()) std::cerr << "[phlab] " << msg << "\n";
}

}  // namespace phlab::io
