#include <iostream>

#include "CLI11.hpp"
#include "phlab/cli_io.hpp"

using namespace phlab;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  int threads = 0;
  std::vector<std::string> experiments;
};

io::RunConfig load(const Options& o) {
  io::RunConfig c = o.config.empty() ? io::RunConfig{} : io::load_config(o.config);
  if (!o.out.empty()) c.output = o.out;
  if (o.seed) c.seed = o.seed;
  if (o.threads) c.threads = o.threads;
  return c;
}

void common(CLI::App* app, Options& o) {
  app->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  app->add_option("--out", o.out, "output directory");
  app->add_option("--seed", o.seed, "random seed (u64, nonzero)");
  app->add_option("--threads", o.threads, "worker threads");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments on partially hyperbolic skew products over toral automorphisms"};
  app.require_subcommand(1);
  Options o;

  auto* validate = app.add_subcommand("validate", "check a configuration");
  common(validate, o);
  auto* describe = app.add_subcommand("describe", "print rates, margins and low-period exponents");
  common(describe, o);
  auto* run = app.add_subcommand("run", "run the configured experiments");
  common(run, o);
  run->add_option("--experiment", o.experiments, "experiments to run, in order (overrides the config)");
  std::vector<std::pair<std::string, CLI::App*>> single;
  for (const auto& name : io::experiment_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    common(sub, o);
    single.emplace_back(name, sub);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    io::RunConfig c = load(o);
    if (*validate) {
      io::validate(c);
      std::cout << "ok " << io::config_hash(c) << "\n";
      return 0;
    }
    if (*describe) {
      std::cout << io::describe(c);
      return 0;
    }
    if (*run) {
      if (run->count("--experiment")) c.experiments = o.experiments;
    } else {
      for (const auto& [name, sub] : single)
        if (*sub) c.experiments = {name};
    }
    const auto r = io::run(c);
    std::cout << r.manifest.string() << "\n";
    return r.exit_code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::ConfigInvalid ? 2 : 1;
  }
}
