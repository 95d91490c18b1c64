#pragma once

// Experiment configuration. One JSON document; schema in README.md.

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tpf/core/window.hpp"

namespace tpf::harness {

using nlohmann::json;

// Field-level configuration problem. what() is a single line.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& msg)
      : std::invalid_argument(field + ": " + msg), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct TwistSpec {
  std::string kind = "constant";  // constant | lag | exact_h | sv_approx
  int ell = 0;
  double tol = 1e-9;
};

struct WindowSpec {
  std::string source = "simulate";
  Time length = 0;   // 0: derived as burn_in + steps + lookahead
  Time burn_in = 0;  // window time 0 sits at this index of the simulated path
  std::uint64_t seed = 0;  // 0: use the run seed
};

struct OracleSpec {
  std::vector<std::size_t> particles{2, 3, 4};
  Time n_first = 1;
  Time n_last = 200;
  Time eval_first = -1;  // absolute path indices for finite_h; -1: derived
  Time eval_last = -1;
  std::vector<int> bound_lags{0, 1, 2, 3, 4, 5, 6};
};

// The 3-state demo chain: symmetric transitions with 1/2 on the diagonal and
// mildly informative emissions.
inline json demo_finite_model() {
  return json{{"kind", "finite"},
              {"mu0", {1.0 / 3, 1.0 / 3, 1.0 / 3}},
              {"trans", {{0.5, 0.25, 0.25}, {0.25, 0.5, 0.25}, {0.25, 0.25, 0.5}}},
              {"emit", {{0.44, 0.28, 0.28}, {0.28, 0.44, 0.28}, {0.28, 0.28, 0.44}}}};
}

struct ExperimentConfig {
  std::string experiment = "run";
  json model = demo_finite_model();
  TwistSpec twist;
  std::string filter = "bootstrap";  // bootstrap | twisted | apf | sis
  std::size_t particles = 100;
  Time steps = 10;
  std::size_t replicates = 1;
  std::uint64_t seed = 1;
  WindowSpec window;
  std::string out = "out";
  std::size_t workers = 1;  // execution only; never changes results

  std::vector<int> lags;                    // variance-growth sweep over ell
  std::vector<std::size_t> particle_grid;   // clt-check N grid
  std::vector<double> phi;                  // finite test function on X
  Time fit_first = 10;                      // variance-growth slope range
  Time fit_last = -1;                       // -1: steps
  std::size_t jackknife_groups = 20;
  OracleSpec oracle;

  std::string model_kind() const { return model.value("kind", std::string("finite")); }
  std::uint64_t window_seed() const { return window.seed ? window.seed : seed; }
};

inline json default_model(const std::string& kind) {
  if (kind == "finite") return demo_finite_model();
  if (kind == "lg")
    return json{{"kind", "lg"}, {"a", 0.9}, {"q", 1.0}, {"r_obs", 1.0}, {"stationary", true}};
  if (kind == "sv")
    return json{{"kind", "sv"}, {"phi", 0.9702}, {"sigma", 0.178}, {"beta", 0.5992}};
  throw ConfigError("model.kind", "unknown model kind '" + kind + "' (finite | lg | sv)");
}

// Observations a twist reads beyond step t.
inline Time twist_lookahead(const TwistSpec& t) {
  if (t.kind == "lag" || t.kind == "sv_approx") return t.ell;
  return 0;
}

// Largest lookahead over the configured twist and any lag sweep.
inline Time max_lookahead(const ExperimentConfig& c) {
  Time l = twist_lookahead(c.twist);
  for (int v : c.lags) l = std::max<Time>(l, v);
  return l;
}

inline Time required_window_length(const ExperimentConfig& c) {
  return c.window.burn_in + c.steps + max_lookahead(c);
}

namespace detail {

template <class T>
void read(const json& j, const char* key, T& out, const std::string& prefix = "") {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(prefix + key, "wrong type");
  }
}

inline void one_of(const std::string& field, const std::string& v,
                   std::initializer_list<const char*> allowed) {
  std::string list;
  for (const char* a : allowed) {
    if (v == a) return;
    list += list.empty() ? a : std::string(" | ") + a;
  }
  throw ConfigError(field, "unknown value '" + v + "' (" + list + ")");
}

}  // namespace detail

inline void validate(const ExperimentConfig& c) {
  detail::one_of("experiment", c.experiment,
                 {"simulate", "run", "variance-growth", "clt-check", "unbiasedness",
                  "oracle-check", "bound"});
  detail::one_of("filter", c.filter, {"bootstrap", "twisted", "apf", "sis"});
  detail::one_of("twist.kind", c.twist.kind, {"constant", "lag", "exact_h", "sv_approx"});
  detail::one_of("model.kind", c.model_kind(), {"finite", "lg", "sv"});
  if (c.twist.ell < 0) throw ConfigError("twist.ell", "must be >= 0");
  if (!(c.twist.tol > 0.0)) throw ConfigError("twist.tol", "must be > 0");
  if (c.particles < 1) throw ConfigError("particles", "must be >= 1");
  if (c.steps < 0) throw ConfigError("steps", "must be >= 0");
  if (c.replicates < 1) throw ConfigError("replicates", "must be >= 1");
  if (c.workers < 1) throw ConfigError("workers", "must be >= 1");
  if (c.window.source != "simulate")
    throw ConfigError("window.source", "only 'simulate' is supported");
  if (c.window.burn_in < 0) throw ConfigError("window.burn_in", "must be >= 0");
  const Time need = required_window_length(c);
  if (c.window.length < need) {
    std::ostringstream m;
    m << "length " << c.window.length << " too short; required window length " << need
      << " (burn_in " << c.window.burn_in << " + steps " << c.steps << " + lookahead "
      << max_lookahead(c) << ")";
    throw ConfigError("window.length", m.str());
  }
  for (int l : c.lags)
    if (l < 0) throw ConfigError("lags", "entries must be >= 0");
  for (std::size_t N : c.particle_grid)
    if (N < 1) throw ConfigError("particle_grid", "entries must be >= 1");
  for (std::size_t N : c.oracle.particles)
    if (N < 1) throw ConfigError("oracle.particles", "entries must be >= 1");
  if (c.jackknife_groups < 2) throw ConfigError("jackknife_groups", "must be >= 2");
  if (c.oracle.n_last - c.oracle.n_first + 1 < 10)
    throw ConfigError("oracle.n_last", "oracle n range needs at least 10 points");
}

// Fills defaults (window length, fit range) and validates.
inline ExperimentConfig resolve(ExperimentConfig c) {
  if (c.window.length == 0) c.window.length = required_window_length(c);
  if (c.fit_last < 0) c.fit_last = c.steps;
  validate(c);
  return c;
}

inline json to_json(const ExperimentConfig& c) {
  return json{
      {"experiment", c.experiment},
      {"model", c.model},
      {"twist", {{"kind", c.twist.kind}, {"ell", c.twist.ell}, {"tol", c.twist.tol}}},
      {"filter", c.filter},
      {"particles", c.particles},
      {"steps", c.steps},
      {"replicates", c.replicates},
      {"seed", c.seed},
      {"window",
       {{"source", c.window.source},
        {"length", c.window.length},
        {"burn_in", c.window.burn_in},
        {"seed", c.window.seed}}},
      {"out", c.out},
      {"lags", c.lags},
      {"particle_grid", c.particle_grid},
      {"phi", c.phi},
      {"fit_first", c.fit_first},
      {"fit_last", c.fit_last},
      {"jackknife_groups", c.jackknife_groups},
      {"oracle",
       {{"particles", c.oracle.particles},
        {"n_first", c.oracle.n_first},
        {"n_last", c.oracle.n_last},
        {"eval_first", c.oracle.eval_first},
        {"eval_last", c.oracle.eval_last},
        {"bound_lags", c.oracle.bound_lags}}}};
}

// Accepts either a config document or a manifest written by a previous run
// (its "config" member is used).
inline ExperimentConfig from_json(const json& doc) {
  const json& j = doc.contains("config") && doc.at("config").is_object() ? doc.at("config") : doc;
  if (!j.is_object()) throw ConfigError("config", "top level must be an object");
  static const std::vector<std::string> known = {
      "experiment", "model", "twist", "filter", "particles", "steps", "replicates", "seed",
      "window", "out", "workers", "lags", "particle_grid", "phi", "fit_first", "fit_last",
      "jackknife_groups", "oracle"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError(key, "unknown configuration key");

  ExperimentConfig c;
  detail::read(j, "experiment", c.experiment);
  if (j.contains("model")) {
    if (!j.at("model").is_object()) throw ConfigError("model", "must be an object");
    const std::string kind = j.at("model").value("kind", std::string("finite"));
    c.model = default_model(kind);
    for (const auto& [k, v] : j.at("model").items()) c.model[k] = v;
  } else {
    c.model = demo_finite_model();
  }
  if (j.contains("twist")) {
    const json& t = j.at("twist");
    detail::read(t, "kind", c.twist.kind, "twist.");
    detail::read(t, "ell", c.twist.ell, "twist.");
    detail::read(t, "tol", c.twist.tol, "twist.");
  }
  detail::read(j, "filter", c.filter);
  detail::read(j, "particles", c.particles);
  detail::read(j, "steps", c.steps);
  detail::read(j, "replicates", c.replicates);
  detail::read(j, "seed", c.seed);
  if (j.contains("window")) {
    const json& w = j.at("window");
    detail::read(w, "source", c.window.source, "window.");
    detail::read(w, "length", c.window.length, "window.");
    detail::read(w, "burn_in", c.window.burn_in, "window.");
    detail::read(w, "seed", c.window.seed, "window.");
  }
  detail::read(j, "out", c.out);
  detail::read(j, "workers", c.workers);
  detail::read(j, "lags", c.lags);
  detail::read(j, "particle_grid", c.particle_grid);
  detail::read(j, "phi", c.phi);
  detail::read(j, "fit_first", c.fit_first);
  detail::read(j, "fit_last", c.fit_last);
  detail::read(j, "jackknife_groups", c.jackknife_groups);
  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    detail::read(o, "particles", c.oracle.particles, "oracle.");
    detail::read(o, "n_first", c.oracle.n_first, "oracle.");
    detail::read(o, "n_last", c.oracle.n_last, "oracle.");
    detail::read(o, "eval_first", c.oracle.eval_first, "oracle.");
    detail::read(o, "eval_last", c.oracle.eval_last, "oracle.");
    detail::read(o, "bound_lags", c.oracle.bound_lags, "oracle.");
  }
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("config", "invalid JSON in '" + path + "' at byte " +
                                    std::to_string(e.byte));
  }
  return from_json(doc);
}

}  // namespace tpf::harness
