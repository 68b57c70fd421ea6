#include <gmp.h>
#include <mpfr.h>

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "phlab/cli_io.hpp"

namespace phlab::io {

namespace {

namespace fs = std::filesystem;
using experiments::GridSpec;

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json orbit_json(const PeriodicOrbit& o) {
  return {{"period", o.period()}, {"base", o.base().to_string()}};
}

Json exponent_json(const skew::BoundaryExponent& e) {
  return {{"period", e.orbit.period()}, {"base", e.orbit.base().to_string()}, {"boundary", e.boundary},
          {"S", num(e.sum.S)},          {"lambda_c", num(e.sum.lambda_c)}};
}

Json interval_json(const fiber::ClosedInterval& I) { return Json::array({num(I.lo), num(I.hi)}); }

Json grid_json(const GridSpec& g) {
  return {{"base_subdivisions", g.base_subdivisions}, {"fiber_subdivisions", g.fiber_subdivisions},
          {"iterations", g.iterations},       {"seed", g.seed},
          {"theta0", g.theta0},               {"trailing_fraction", g.trailing_fraction},
          {"samples_per_cell", g.samples_per_cell}, {"cloud_size", g.cloud_size},
          {"reach_samples", g.reach_samples}};
}

Json quadrature_json(const skew::QuadratureResult& q) {
  return {{"value", num(q.value)}, {"error", num(q.error)}, {"sign", q.sign}, {"resolution", q.resolution}};
}

Json overlap_json(const skew::FiberOverlap& o) {
  return {{"contracting", exponent_json(o.contracting)},
          {"expanding", exponent_json(o.expanding)},
          {"z", o.z.point.to_string()},
          {"z_lift_norm", num(o.z.lift_norm)},
          {"stable_trace", interval_json(o.stable_trace)},
          {"unstable_trace", interval_json(o.unstable_trace)},
          {"overlap", interval_json(o.overlap)},
          {"overlap_length", num(o.overlap.length())},
          {"backward_steps", o.backward_steps},
          {"tail_bound", num(o.tail_bound)},
          {"thin", o.thin}};
}

std::string csv_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

PeriodicOrbit orbit_from(const SkewProduct& F, const std::vector<std::string>& base) {
  RatVec q;
  for (const auto& s : base) {
    Rational r(s);
    r.canonicalize();
    q.push_back(r);
  }
  return torus::orbit_of(F.base(), torus::TorusPoint::exact(std::move(q)));
}

Json ari_json(const experiments::AriReport& r) {
  Json steps = Json::array();
  for (const auto& s : r.steps) {
    steps.push_back({{"m", s.m},
                     {"pbar", orbit_json(s.pbar)},
                     {"S_pbar", num(s.S_pbar)},
                     {"K", s.K},
                     {"L", s.L},
                     {"K0", s.K0},
                     {"K1", s.K1},
                     {"L0", s.L0},
                     {"L1", s.L1},
                     {"eps_bar", num(s.eps_bar)},
                     {"jump", num(s.jump)},
                     {"period_prime", s.period_prime},
                     {"period_double", s.period_double},
                     {"S_prime", num(s.S_prime)},
                     {"S_double", num(s.S_double)},
                     {"shadow_error", num(s.shadow_error)},
                     {"exact_periodic", s.exact_periodic},
                     {"sandwich", num(s.sandwich)},
                     {"sandwich_holds", s.sandwich_holds},
                     {"chosen", s.chosen},
                     {"S_pm", num(s.S_pm)},
                     {"lambda_pm", num(s.lambda_pm)},
                     {"independence", num(s.independence)},
                     {"independence_K", s.independence_K},
                     {"drift", num(s.drift)},
                     {"P", num(s.P)},
                     {"drift_bound", num(s.drift_bound)},
                     {"pliss_applicable", s.pliss_applicable},
                     {"pliss_shift", s.pliss_shift},
                     {"center_size", num(s.center_size)},
                     {"center_bound", num(s.center_bound)}});
  }
  return {{"p0", orbit_json(r.p0)},
          {"q0", orbit_json(r.q0)},
          {"S_p0", num(r.S_p0)},
          {"S_q0", num(r.S_q0)},
          {"C", num(r.C)},
          {"pool_period_cap", r.pool_period_cap},
          {"pool_size", r.pool_size},
          {"achieved_m", r.achieved_m},
          {"monotone_independence", r.monotone_independence},
          {"monotone_drift", r.monotone_drift},
          {"all_sandwiches", r.all_sandwiches},
          {"steps", steps}};
}

Report exponents(const RunConfig& c, const SkewProduct& F) {
  Report rep;
  Json list = Json::array();
  std::ostringstream csv;
  csv << "boundary,period,base,S,lambda_c\n";
  for (int b : {0, 1})
    for (const auto& e : skew::periodic_exponents(F, b, c.caps.period_cap)) {
      list.push_back(exponent_json(e));
      csv << b << "," << e.orbit.period() << ",\"" << e.orbit.base().to_string() << "\"," << csv_double(e.sum.S)
          << "," << csv_double(e.sum.lambda_c) << "\n";
    }
  rep.json = {{"period_cap", c.caps.period_cap},
              {"integral_0", quadrature_json(skew::boundary_exponent_integral(F, 0))},
              {"integral_1", quadrature_json(skew::boundary_exponent_integral(F, 1))},
              {"orbits", list}};
  rep.side_files.emplace_back("exponents.csv", csv.str());
  return rep;
}

Report interconnect(const RunConfig& c, const SkewProduct& F) {
  skew::InterconnectionOptions opt;
  opt.period_cap = c.caps.interconnect_period_cap;
  const auto r = skew::boundary_interconnection(F, opt);
  Report rep;
  rep.json = {{"period_cap", opt.period_cap},
              {"found", r.found()},
              {"candidates_tried", r.candidates_tried},
              {"thin_overlap_seen", r.thin_overlap_seen},
              {"absent_reason", r.absent_reason}};
  if (r.found()) {
    rep.json["p_pair"] = overlap_json(r.witness->p_pair);
    rep.json["q_pair"] = overlap_json(r.witness->q_pair);
  }
  return rep;
}

Report transitivity(const RunConfig& c, const SkewProduct& F) {
  const auto r = experiments::transitivity_probe(F, c.effective_grid());
  Report rep;
  rep.json = {{"grid", grid_json(r.grid)},
              {"cells", r.cells},
              {"visited", r.visited},
              {"visited_fraction", num(r.visited_fraction)},
              {"single_orbit_fraction", num(r.single_orbit_fraction)},
              {"steps_per_point", r.steps_per_point},
              {"box_center", r.box_center},
              {"box_t", num(r.box_t)},
              {"box_half_width", num(r.box_half_width)},
              {"first_hit_max", r.first_hit_max},
              {"first_hit_median", num(r.first_hit_median)},
              {"reach_edges", r.reach_edges},
              {"visited_components", r.visited_components},
              {"strongly_connected", r.strongly_connected},
              {"note", r.note}};
  std::ostringstream csv;
  csv << "cell,first_hit\n";
  for (std::size_t i = 0; i < r.first_hit.size(); ++i) csv << i << "," << r.first_hit[i] << "\n";
  rep.side_files.emplace_back("transitivity_cells.csv", csv.str());
  return rep;
}

Report basins(const RunConfig& c, const SkewProduct& F) {
  const auto r = experiments::intermingled_basins_scan(F, c.effective_grid());
  Report rep;
  rep.json = {{"grid", grid_json(r.grid)},
              {"cells", r.cells.size()},
              {"samples", r.samples},
              {"b0", r.b0},
              {"b1", r.b1},
              {"unresolved", r.unresolved},
              {"union_fraction", num(r.union_fraction)},
              {"min_b0_fraction", num(r.min_b0_fraction)},
              {"min_b1_fraction", num(r.min_b1_fraction)},
              {"b0_fraction", num(r.b0_fraction)},
              {"b1_fraction", num(r.b1_fraction)},
              {"b0_stderr", num(r.b0_stderr)},
              {"b1_stderr", num(r.b1_stderr)},
              {"interior_samples", r.interior_samples},
              {"interior_b0", r.interior_b0},
              {"interior_b1", r.interior_b1},
              {"interior_unresolved", r.interior_unresolved},
              {"early_stops", r.early_stops}};
  std::ostringstream csv;
  csv << "cell,b0,b1,unresolved\n";
  for (std::size_t i = 0; i < r.cells.size(); ++i)
    csv << i << "," << r.cells[i].b0 << "," << r.cells[i].b1 << "," << r.cells[i].unresolved << "\n";
  rep.side_files.emplace_back("basins_cells.csv", csv.str());
  if (F.dimension() == 2)
    for (int layer = 0; layer < r.grid.fiber_subdivisions; ++layer)
      for (int b : {0, 1})
        rep.side_files.emplace_back("basins_b" + std::to_string(b) + "_layer" + std::to_string(layer) + ".pgm",
                                    experiments::basin_pgm(r, layer, b));
  return rep;
}

Report density(const RunConfig& c, const SkewProduct& F) {
  const auto r = experiments::birkhoff_density_scan(F, 0, c.caps.period_cap, c.caps.density_R, c.caps.density_eps,
                                                    c.caps.density_bins);
  Report rep;
  rep.json = {{"boundary", r.boundary},
              {"period_cap", r.period_cap},
              {"R", num(r.R)},
              {"eps", num(r.eps)},
              {"orbits", r.orbits},
              {"min_S", num(r.min_S)},
              {"max_S", num(r.max_S)},
              {"negative", r.negative},
              {"positive", r.positive},
              {"in_window", r.in_window},
              {"covering_radius", num(r.covering_radius)},
              {"dense", r.dense},
              {"bin_edges", r.bin_edges},
              {"histogram", r.histogram}};
  std::ostringstream csv;
  csv << "lo,hi,count\n";
  for (std::size_t i = 0; i < r.histogram.size(); ++i)
    csv << csv_double(r.bin_edges[i]) << "," << csv_double(r.bin_edges[i + 1]) << "," << r.histogram[i] << "\n";
  rep.side_files.emplace_back("density_histogram.csv", csv.str());
  return rep;
}

Report ari(const RunConfig& c, const SkewProduct& F) {
  PeriodicOrbit p0, q0;
  if (c.ari_p0.empty() || c.ari_q0.empty()) {
    const auto ex = skew::periodic_exponents(F, 0, 2);
    auto lo = std::min_element(ex.begin(), ex.end(),
                               [](const auto& a, const auto& b) { return a.sum.lambda_c < b.sum.lambda_c; });
    auto hi = std::max_element(ex.begin(), ex.end(),
                               [](const auto& a, const auto& b) { return a.sum.lambda_c < b.sum.lambda_c; });
    p0 = lo->orbit;
    q0 = hi->orbit;
  }
  if (!c.ari_p0.empty()) p0 = orbit_from(F, c.ari_p0);
  if (!c.ari_q0.empty()) q0 = orbit_from(F, c.ari_q0);
  Report rep;
  rep.json = ari_json(experiments::ari_sequence_build(F, p0, q0, c.caps.ari_m, c.caps.ari_pool_period_cap));
  return rep;
}

Report perturb(const RunConfig& c, const SkewProduct& F) {
  const double tau = c.caps.perturb_tau;
  const auto r = skew::perturb_flow(F, tau);
  Json shifts = Json::array();
  double worst = 0;
  for (const auto& s : r.shifts) {
    const double expected = s.boundary == 0 ? -tau : tau;
    worst = std::max(worst, std::abs(s.lambda_G - s.lambda_F - expected));
    shifts.push_back({{"period", s.orbit.period()},
                      {"base", s.orbit.base().to_string()},
                      {"boundary", s.boundary},
                      {"lambda_F", num(s.lambda_F)},
                      {"lambda_G", num(s.lambda_G)}});
  }
  skew::InterconnectionOptions opt;
  opt.period_cap = c.caps.interconnect_period_cap;
  const auto ic = skew::boundary_interconnection(r.G, opt);
  Report rep;
  rep.json = {{"tau", num(tau)},
              {"alpha", num(r.alpha)},
              {"max_shift_error", num(worst)},
              {"G_interconnected", ic.found()},
              {"G_absent_reason", ic.absent_reason},
              {"shifts", shifts}};
  return rep;
}

Report counterexample(const RunConfig& c, const SkewProduct&) {
  const auto& h = c.counterexample;
  const auto r = experiments::horseshoe_counterexample_demo(fiber::IntervalMap::mobius(h.alpha), h.U, h.V,
                                                            c.caps.horseshoe_range, c.caps.horseshoe_iterations,
                                                            c.seed);
  Report rep;
  rep.json = {{"alpha", num(h.alpha)},
              {"lambda_p0", num(r.lambda_p0)},
              {"lambda_p1", num(r.lambda_p1)},
              {"lambda_q0", num(r.lambda_q0)},
              {"lambda_q1", num(r.lambda_q1)},
              {"sign_pattern", r.sign_pattern},
              {"U", interval_json(r.U)},
              {"V", interval_json(r.V)},
              {"separation_range", r.separation_range},
              {"min_separation", num(r.min_separation)},
              {"iterations", r.iterations},
              {"orbits", r.orbits},
              {"word_length", r.word_length},
              {"violations", r.violations},
              {"max_excursion", r.max_excursion}};
  return rep;
}

void write_file(const fs::path& p, const std::string& data) {
  std::ofstream out(p, std::ios::binary);
  out << data;
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + p.string());
}

std::string versions_string() {
  std::ostringstream os;
  os << "phlab " << kVersion << "; gcc " << __VERSION__ << "; eigen " << EIGEN_WORLD_VERSION << "."
     << EIGEN_MAJOR_VERSION << "." << EIGEN_MINOR_VERSION << "; gmp " << gmp_version << "; mpfr "
     << mpfr_get_version() << "; json " << NLOHMANN_JSON_VERSION_MAJOR << "." << NLOHMANN_JSON_VERSION_MINOR << "."
     << NLOHMANN_JSON_VERSION_PATCH;
  return os.str();
}

}  // namespace

Report run_experiment(const std::string& name, const RunConfig& c, const SkewProduct& F) {
  Report r;
  if (name == "exponents") r = exponents(c, F);
  else if (name == "interconnect") r = interconnect(c, F);
  else if (name == "transitivity") r = transitivity(c, F);
  else if (name == "basins") r = basins(c, F);
  else if (name == "density") r = density(c, F);
  else if (name == "ari") r = ari(c, F);
  else if (name == "perturb") r = perturb(c, F);
  else if (name == "counterexample") r = counterexample(c, F);
  else throw Error(ErrorCode::ConfigInvalid, "experiments: unknown experiment " + name);
  Json out;
  out["experiment"] = name;
  out["seed"] = c.seed;
  out["report"] = std::move(r.json);
  r.json = std::move(out);
  return r;
}

RunResult run(const RunConfig& c) {
  validate(c);
  const fs::path dir(c.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

  const SkewProduct F = build_system(c);
  RunResult res;
  Json files = Json::array();
  const auto t_all = std::chrono::steady_clock::now();

  auto write_manifest = [&] {
    Json exps = Json::array();
    for (const auto& r : res.records) {
      Json e = {{"name", r.name}, {"status", r.status}, {"seconds", r.seconds}, {"files", r.files}};
      if (!r.error.empty()) e["error"] = r.error;
      exps.push_back(std::move(e));
    }
    Json m = {{"version", kVersion},
              {"versions", versions_string()},
              {"config_hash", config_hash(c)},
              {"config", config_to_json(c)},
              {"status", res.exit_code == 0 ? "ok" : "error"},
              {"total_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t_all).count()},
              {"experiments", exps},
              {"files", files}};
    res.manifest = dir / "manifest.json";
    write_file(res.manifest, m.dump(2) + "\n");
  };

  auto emit = [&](ExperimentRecord& rec, const std::string& fname, const std::string& data) {
    write_file(dir / fname, data);
    rec.files.push_back(fname);
    files.push_back({{"path", fname}, {"bytes", data.size()}, {"fnv1a64", hex64(fnv1a(data))}});
  };

  for (const auto& name : c.experiments) {
    ExperimentRecord rec;
    rec.name = name;
    log(1, "running " + name);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      Report r = run_experiment(name, c, F);
      emit(rec, name + ".json", r.json.dump(2) + "\n");
      for (const auto& [fname, data] : r.side_files) emit(rec, fname, data);
      rec.status = "ok";
    } catch (const experiments::CandidateExhausted& e) {
      Json partial = {{"experiment", name}, {"seed", c.seed},
                      {"error", e.what()},  {"report", ari_json(e.partial())}};
      emit(rec, name + ".json", partial.dump(2) + "\n");
      rec.status = "error";
      rec.error = e.what();
    } catch (const Error& e) {
      rec.status = "error";
      rec.error = e.what();
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log(2, name + " took " + std::to_string(rec.seconds) + " s");
    const bool failed = rec.status != "ok";
    if (failed) log(0, "experiment " + name + " failed: " + rec.error);
    res.records.push_back(std::move(rec));
    if (failed) {
      res.exit_code = 3;
      break;
    }
  }
  write_manifest();
  return res;
}

std::string describe(const RunConfig& c) {
  validate(c);
  const SkewProduct F = build_system(c);
  const auto& sp = F.base().splitting();
  const auto& m = F.margins();
  std::ostringstream os;
  os << std::setprecision(6);
  os << "system    " << F.dimension() << "-torus automorphism, fiber " << F.fiber().descriptor() << "\n";
  os << "matrix   ";
  for (const auto& row : c.system.matrix) {
    os << " [";
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? " " : "") << row[j];
    os << "]";
  }
  os << "\n";
  os << "lambda_u  " << sp.rate_u << "\n";
  os << "lambda_s  " << sp.rate_s << "\n";
  os << "dphi/dt   [" << m.inf_dt << ", " << m.sup_dt << "]\n";
  os << "margin_s  " << m.stable << "\n";
  os << "margin_u  " << m.unstable << "\n";
  os << "\nperiod  base                 lambda_c(M0)  lambda_c(M1)\n";
  const auto e0 = skew::periodic_exponents(F, 0, 2), e1 = skew::periodic_exponents(F, 1, 2);
  for (std::size_t i = 0; i < e0.size(); ++i) {
    os << std::left << std::setw(8) << e0[i].orbit.period() << std::setw(21) << e0[i].orbit.base().to_string()
       << std::right << std::setw(12) << e0[i].sum.lambda_c << "  " << std::setw(12) << e1[i].sum.lambda_c << "\n";
  }
  return os.str();
}

}  // namespace phlab::io
