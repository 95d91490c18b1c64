#pragma once

// Small models and helpers shared by the unit suites.

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "tpf/harness/config.hpp"
#include "tpf/harness/setup.hpp"
#include "tpf/models/finite_hmm.hpp"
#include "tpf/models/simulate.hpp"

namespace tpf::test {

// Hand-picked 2-state, 2-symbol HMM.
inline FiniteHmmParams two_state_params() {
  FiniteHmmParams p;
  p.mu0 = {0.6, 0.4};
  p.trans.resize(2, 2);
  p.trans << 0.7, 0.3, 0.2, 0.8;
  p.emit.resize(2, 2);
  p.emit << 0.9, 0.1, 0.3, 0.7;
  return p;
}

// 3-state chain with a 3-symbol alphabet, sticky and informative enough that
// variance growth is visible at small n.
inline FiniteHmmParams three_state_params() {
  FiniteHmmParams p;
  p.mu0 = {0.5, 0.3, 0.2};
  p.trans.resize(3, 3);
  p.trans << 0.8, 0.15, 0.05, 0.1, 0.7, 0.2, 0.15, 0.15, 0.7;
  p.emit.resize(3, 3);
  p.emit << 0.7, 0.2, 0.1, 0.2, 0.6, 0.2, 0.1, 0.3, 0.6;
  return p;
}

inline FiniteHmmParams demo_params() {
  return harness::finite_params(harness::demo_finite_model());
}

// Emissions independent of the state: G is constant in x.
inline FiniteHmmParams flat_emission_params(std::size_t k, std::size_t m) {
  FiniteHmmParams p;
  p.mu0.assign(k, 1.0 / static_cast<double>(k));
  p.trans = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k),
                                      0.5 / static_cast<double>(k - 1));
  p.trans.diagonal().setConstant(0.5);
  if (k == 1) p.trans(0, 0) = 1.0;
  p.emit = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m),
                                     1.0 / static_cast<double>(m));
  return p;
}

inline ObservationWindow<int> simulated_window(const FiniteHmm& m, Time n, std::uint64_t seed) {
  return simulate(m, n, seed).window;
}

// The shipped demo environment: window 400, burn-in 100, seed 11.
inline harness::ExperimentConfig demo_config() {
  harness::ExperimentConfig c;
  c.experiment = "oracle-check";
  c.seed = 11;
  c.window.length = 400;
  c.window.burn_in = 100;
  c.phi = {1.0, 0.0, 0.0};
  return harness::resolve(c);
}

inline harness::Environment<FiniteHmm> demo_env() {
  const auto c = demo_config();
  return harness::make_environment(c, FiniteHmm(demo_params()));
}

inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

inline std::vector<double> frequencies(const std::vector<std::size_t>& counts) {
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  std::vector<double> f(counts.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<double>(counts[i]) / total;
  return f;
}

inline double max_abs(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace tpf::test
