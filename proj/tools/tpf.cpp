// tpf: command-line driver for the experiment harness.
//
//   tpf <subcommand> [--config FILE] [--seed U64] [--out DIR] [overrides]
//
// Exit codes: 0 ok, 1 usage or configuration error, 2 runtime error,
// 3 the experiment ran but one of its checks failed.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "tpf/harness/config.hpp"
#include "tpf/harness/experiments.hpp"
#include "tpf/harness/manifest.hpp"

namespace {

using namespace tpf::harness;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> particles;
  std::optional<long long> steps;
  std::optional<std::size_t> replicates;
  std::optional<int> lag;
  std::optional<std::string> filter;
  std::optional<std::string> model;
  std::optional<std::size_t> workers;
};

void add_flags(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON config or a manifest.json from an earlier run");
  sub->add_option("--seed", o.seed, "root seed");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--particles", o.particles, "particles N (chains for sis)");
  sub->add_option("--steps", o.steps, "horizon n");
  sub->add_option("--replicates", o.replicates, "independent replicates R");
  sub->add_option("--lag", o.lag, "twist lag; selects the lag twist for finite/lg models");
  sub->add_option("--filter", o.filter, "bootstrap | twisted | apf | sis");
  sub->add_option("--model", o.model, "finite | lg | sv (default parameters for the kind)");
  sub->add_option("--workers", o.workers, "threads for replicates; results do not depend on it");
}

ExperimentConfig build_config(const std::string& experiment, const Overrides& o) {
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  c.experiment = experiment;
  if (o.model && *o.model != c.model_kind()) c.model = default_model(*o.model);
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.out = *o.out;
  if (o.particles) c.particles = *o.particles;
  if (o.steps) c.steps = *o.steps;
  if (o.replicates) c.replicates = *o.replicates;
  if (o.filter) c.filter = *o.filter;
  if (o.workers) c.workers = *o.workers;
  if (o.lag) {
    c.twist.ell = *o.lag;
    if (c.twist.kind == "constant") c.twist.kind = c.model_kind() == "sv" ? "sv_approx" : "lag";
    c.lags.clear();
  }
  return resolve(std::move(c));
}

// One line, no embedded newlines.
std::string one_line(std::string s) {
  for (char& ch : s)
    if (ch == '\n' || ch == '\r') ch = ' ';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"twisted particle filter experiments"};
  app.require_subcommand(1);
  Overrides o;
  const char* subs[][2] = {
      {"simulate", "simulate an observation path and write path.csv"},
      {"run", "one filter run; writes trace.csv"},
      {"variance-growth", "relative second moment of the likelihood estimate over n"},
      {"clt-check", "empirical vs exact asymptotic variances"},
      {"unbiasedness", "replicate mean of the likelihood estimate vs the exact value"},
      {"oracle-check", "exact moments, slopes, bounds and kernel identities"},
      {"bound", "variance-growth bound over lag twists"},
  };
  for (const auto& s : subs) add_flags(app.add_subcommand(s[0], s[1]), o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << '\n';
    return 1;
  }

  const std::string experiment = app.get_subcommands().front()->get_name();
  ExperimentConfig c;
  try {
    c = build_config(experiment, o);
  } catch (const ConfigError& e) {
    std::cerr << "error: config: " << one_line(e.what()) << '\n';
    return 1;
  }

  try {
    const std::filesystem::path dir = c.out;
    const Outcome outcome = run_experiment(c, dir);
    write_manifest(dir, c, outcome);
    for (const auto& f : outcome.files) std::cout << (dir / f).string() << '\n';
    std::cout << (dir / "manifest.json").string() << '\n';
    if (!outcome.passed()) {
      for (const auto& ch : outcome.checks)
        if (!ch.pass) {
          std::cerr << "error: check: " << ch.name << " value " << ch.value << " threshold "
                    << ch.threshold << '\n';
          break;
        }
      return 3;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: config: " << one_line(e.what()) << '\n';
    return 1;
  } catch (const tpf::WindowError& e) {
    std::cerr << "error: window: " << one_line(e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: runtime: " << one_line(e.what()) << '\n';
    return 2;
  }
  return 0;
}
