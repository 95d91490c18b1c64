#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "tpf/harness/config.hpp"
#include "tpf/harness/experiments.hpp"

#ifndef TPF_VERSION
#define TPF_VERSION "0.0.0"
#endif

namespace tpf::harness {

// Resolved config plus seed and artifact version. The output directory and
// worker count are left out: neither changes any number, and leaving them out
// keeps manifests of identical runs byte-identical.
inline json manifest(const ExperimentConfig& c, const Outcome& outcome) {
  json cfg = to_json(c);
  cfg.erase("out");
  json checks = json::array();
  for (const auto& ch : outcome.checks)
    checks.push_back({{"name", ch.name}, {"value", ch.value}, {"threshold", ch.threshold},
                      {"pass", ch.pass}});
  return json{{"artifact", "tpf"},
              {"version", TPF_VERSION},
              {"experiment", c.experiment},
              {"seed", c.seed},
              {"config", cfg},
              {"outputs", outcome.files},
              {"checks", checks}};
}

inline void write_manifest(const std::filesystem::path& dir, const ExperimentConfig& c,
                           const Outcome& outcome) {
  std::filesystem::create_directories(dir);
  std::ofstream os(dir / "manifest.json");
  os << manifest(c, outcome).dump(2) << '\n';
}

}  // namespace tpf::harness
