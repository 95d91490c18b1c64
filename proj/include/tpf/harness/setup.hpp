#pragma once

// Builds models, observation windows, twists and filters from a config.

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tpf/filters/apf.hpp"
#include "tpf/filters/bootstrap.hpp"
#include "tpf/filters/sis.hpp"
#include "tpf/filters/twisted.hpp"
#include "tpf/harness/config.hpp"
#include "tpf/models/finite_hmm.hpp"
#include "tpf/models/linear_gaussian.hpp"
#include "tpf/models/simulate.hpp"
#include "tpf/models/stochastic_volatility.hpp"
#include "tpf/twist/eigen.hpp"
#include "tpf/twist/gaussian.hpp"
#include "tpf/twist/tabulated.hpp"

namespace tpf::harness {

namespace detail {

inline Eigen::MatrixXd matrix_from(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ConfigError(field, "must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j.at(static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ConfigError(field, "rows must all have the same length");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& prefix) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(prefix + key, "wrong type");
  }
}

}  // namespace detail

inline FiniteHmmParams finite_params(const json& m) {
  FiniteHmmParams p;
  try {
    p.trans = detail::matrix_from(m.at("trans"), "model.trans");
    p.emit = detail::matrix_from(m.at("emit"), "model.emit");
    if (m.contains("mu0")) p.mu0 = m.at("mu0").get<std::vector<double>>();
    else p.mu0.assign(static_cast<std::size_t>(p.trans.rows()), 1.0 / static_cast<double>(p.trans.rows()));
    p.validate();
  } catch (const json::exception& e) {
    throw ConfigError("model", std::string("finite model: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("model", e.what());
  }
  return p;
}

inline LinearGaussianParams lg_params(const json& m) {
  const double a = detail::get_or(m, "a", 0.9, "model.");
  const double q = detail::get_or(m, "q", 1.0, "model.");
  const double r = detail::get_or(m, "r_obs", 1.0, "model.");
  try {
    LinearGaussianParams p;
    if (detail::get_or(m, "stationary", true, "model.")) {
      p = LinearGaussianParams::stationary(a, q, r);
    } else {
      p = {a, q, r, detail::get_or(m, "mu0_mean", 0.0, "model."),
           detail::get_or(m, "mu0_var", 1.0, "model.")};
    }
    p.validate();
    return p;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("model", e.what());
  }
}

inline SvParams sv_params(const json& m) {
  SvParams p;
  p.phi = detail::get_or(m, "phi", p.phi, "model.");
  p.sigma = detail::get_or(m, "sigma", p.sigma, "model.");
  p.beta = detail::get_or(m, "beta", p.beta, "model.");
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("model", e.what());
  }
  return p;
}

// f(model) with the concrete model type named in the config.
template <class F>
decltype(auto) with_model(const ExperimentConfig& c, F&& f) {
  const std::string kind = c.model_kind();
  if (kind == "finite") return f(FiniteHmm(finite_params(c.model)));
  if (kind == "lg") return f(LinearGaussianModel(lg_params(c.model)));
  if (kind == "sv") return f(StochasticVolatilityModel(sv_params(c.model)));
  throw ConfigError("model.kind", "unknown model kind '" + kind + "'");
}

template <class Model>
struct Environment {
  Model model;
  SimulatedPath<typename Model::State, typename Model::Observation> path;
  WindowOf<Model> full;  // the simulated path, origin 0
  WindowOf<Model> w;     // full shifted so that time 0 is at burn_in
};

template <class Model>
Environment<Model> make_environment(const ExperimentConfig& c, Model model) {
  auto path = simulate(model, c.window.length, c.window_seed());
  auto full = path.window;
  auto w = full.shift(c.window.burn_in);
  return {std::move(model), std::move(path), std::move(full), std::move(w)};
}

inline std::string unsupported(const std::string& kind, const std::string& model) {
  return "twist kind '" + kind + "' is not available for model '" + model + "'";
}

// f(twist) with the concrete twist type. Tables are built on the full path
// so any shift of it can query them.
template <class F>
decltype(auto) with_twist(const Environment<FiniteHmm>& env, const TwistSpec& spec, F&& f) {
  if (spec.kind == "constant") return f(ConstantTwist<FiniteHmm>(env.model));
  if (spec.kind == "lag") return f(lag_twist_finite(env.model, env.full, spec.ell));
  if (spec.kind == "exact_h") return f(exact_h_twist(env.model, env.full));
  throw ConfigError("twist.kind", unsupported(spec.kind, "finite"));
}

template <class F>
decltype(auto) with_twist(const Environment<LinearGaussianModel>& env, const TwistSpec& spec,
                          F&& f) {
  if (spec.kind == "constant") return f(ConstantTwist<LinearGaussianModel>(env.model));
  if (spec.kind == "lag") return f(lg_lag_twist(env.model.params(), env.full, spec.ell));
  throw ConfigError("twist.kind", unsupported(spec.kind, "lg"));
}

template <class F>
decltype(auto) with_twist(const Environment<StochasticVolatilityModel>& env,
                          const TwistSpec& spec, F&& f) {
  if (spec.kind == "constant") return f(ConstantTwist<StochasticVolatilityModel>(env.model));
  if (spec.kind == "sv_approx" || spec.kind == "lag")
    return f(sv_approx_twist(env.model.params(), env.full, spec.ell));
  throw ConfigError("twist.kind", unsupported(spec.kind, "sv"));
}

// Registered test function: phi on X for finite models (default indicator of
// state 0), the identity for LG, the identity clipped to [-10, 10] for SV.
inline std::vector<double> finite_phi(const ExperimentConfig& c, std::size_t k) {
  if (c.phi.empty()) {
    std::vector<double> v(k, 0.0);
    v[0] = 1.0;
    return v;
  }
  if (c.phi.size() != k)
    throw ConfigError("phi", "needs one value per state (" + std::to_string(k) + ")");
  return c.phi;
}

inline std::vector<TestFunction<std::size_t>> test_functions(const ExperimentConfig& c,
                                                             const FiniteHmm& m) {
  const auto phi = finite_phi(c, m.num_states());
  return {{"phi", [phi](const std::size_t& x) { return phi[x]; }}};
}
inline std::vector<TestFunction<double>> test_functions(const ExperimentConfig&,
                                                        const LinearGaussianModel&) {
  return {{"x", [](const double& x) { return x; }}};
}
inline std::vector<TestFunction<double>> test_functions(const ExperimentConfig&,
                                                        const StochasticVolatilityModel&) {
  return {{"x_clip", [](const double& x) { return std::clamp(x, -10.0, 10.0); }}};
}

// Exact log Z_t and eta_t(test) for t = 0..n where available.
struct ExactReference {
  std::vector<double> log_Z;
  std::vector<double> eta_test;
};

inline std::optional<ExactReference> exact_reference(const Environment<FiniteHmm>& env,
                                                     const ExperimentConfig& c, Time n) {
  const auto pass = finite_forward(env.model, env.w, n);
  const auto phi = finite_phi(c, env.model.num_states());
  ExactReference ref{pass.log_Z, {}};
  for (const auto& law : pass.laws) ref.eta_test.push_back(law.expect(phi));
  return ref;
}
inline std::optional<ExactReference> exact_reference(const Environment<LinearGaussianModel>& env,
                                                     const ExperimentConfig&, Time n) {
  const auto k = kalman_run(env.model.params(), env.w, n);
  return ExactReference{k.log_Z, k.pred_mean};
}
inline std::optional<ExactReference> exact_reference(
    const Environment<StochasticVolatilityModel>&, const ExperimentConfig&, Time) {
  return std::nullopt;
}

template <class Model, class Twist>
RunResult<typename Model::State> run_filter(const std::string& filter, const Model& model,
                                            const Twist& twist, const WindowOf<Model>& w,
                                            const RunOptions<typename Model::State>& opt) {
  if (filter == "bootstrap") return bootstrap_run(model, w, opt);
  if (filter == "twisted") return twisted_run(model, twist, w, opt);
  if (filter == "apf") return apf_run(model, twist, w, opt);
  if (filter == "sis") return sis_run(model, twist, w, opt);
  throw ConfigError("filter", "unknown filter '" + filter + "'");
}

}  // namespace tpf::harness
