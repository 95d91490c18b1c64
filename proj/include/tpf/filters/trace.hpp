#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "tpf/core/window.hpp"

namespace tpf {

template <class State>
struct TestFunction {
  std::string name;
  std::function<double(const State&)> f;
};

// Per-time record of one run, indexed by n = 0..n_max.
struct RunTrace {
  std::vector<double> log_Z;    // log of the likelihood estimate at n
  std::vector<double> log_phi;  // log phi_n; 0 at n = 0 and for standard runs
  std::vector<std::string> phi_names;
  std::vector<std::vector<double>> eta_phi;    // [test][n]
  std::vector<std::vector<double>> gamma_phi;  // [test][n]
  std::map<std::string, std::vector<double>> aux;

  Time steps() const { return static_cast<Time>(log_Z.size()) - 1; }
  std::size_t test_index(const std::string& name) const {
    for (std::size_t j = 0; j < phi_names.size(); ++j)
      if (phi_names[j] == name) return j;
    throw std::out_of_range("RunTrace: no test function named " + name);
  }
};

template <class State>
struct RunOptions {
  std::size_t N = 100;  // particles (chains for SIS)
  Time n = 10;
  std::uint64_t seed = 1;
  std::uint64_t replicate = 0;
  std::vector<TestFunction<State>> tests;
};

template <class State>
struct RunResult {
  RunTrace trace;
  std::vector<State> initial;  // zeta_0
  std::vector<State> final;    // zeta_n
};

inline void write_trace_csv(std::ostream& os, const RunTrace& tr) {
  os.precision(17);
  os << "n,log_Z,log_phi";
  for (const auto& name : tr.phi_names) os << ",eta_phi_" << name;
  for (const auto& name : tr.phi_names) os << ",gamma_phi_" << name;
  os << '\n';
  for (std::size_t n = 0; n < tr.log_Z.size(); ++n) {
    os << n << ',' << tr.log_Z[n] << ',' << tr.log_phi[n];
    for (const auto& v : tr.eta_phi) os << ',' << v[n];
    for (const auto& v : tr.gamma_phi) os << ',' << v[n];
    os << '\n';
  }
}

}  // namespace tpf
