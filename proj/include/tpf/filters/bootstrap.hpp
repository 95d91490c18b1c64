#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tpf/core/log_math.hpp"
#include "tpf/core/rng.hpp"
#include "tpf/fk.hpp"
#include "tpf/filters/resample.hpp"
#include "tpf/filters/trace.hpp"

namespace tpf {

namespace detail {

inline RngStream stream(std::uint64_t seed, std::uint64_t rep, Time step,
                        std::size_t particle, Purpose purpose) {
  return RngStream(seed, {rep, static_cast<std::uint64_t>(step),
                          static_cast<std::uint64_t>(particle), purpose});
}

template <class State>
void init_trace(RunTrace& tr, const RunOptions<State>& opt) {
  const auto len = static_cast<std::size_t>(opt.n) + 1;
  tr.log_Z.assign(len, 0.0);
  tr.log_phi.assign(len, 0.0);
  tr.phi_names.clear();
  for (const auto& tf : opt.tests) tr.phi_names.push_back(tf.name);
  tr.eta_phi.assign(opt.tests.size(), std::vector<double>(len, 0.0));
  tr.gamma_phi.assign(opt.tests.size(), std::vector<double>(len, 0.0));
}

template <class State>
void record_tests(RunTrace& tr, const RunOptions<State>& opt, Time n,
                  const std::vector<State>& cloud, double log_z) {
  const auto k = static_cast<std::size_t>(n);
  for (std::size_t j = 0; j < opt.tests.size(); ++j) {
    double s = 0.0;
    for (const auto& x : cloud) s += opt.tests[j].f(x);
    const double eta = s / static_cast<double>(cloud.size());
    tr.eta_phi[j][k] = eta;
    tr.gamma_phi[j][k] = eta * std::exp(log_z);
  }
}

template <class State>
void check_options(const RunOptions<State>& opt) {
  if (opt.N == 0) throw std::invalid_argument("particle count N must be >= 1");
  if (opt.n < 0) throw std::invalid_argument("horizon n must be >= 0");
}

template <FeynmanKacModel Model>
std::vector<typename Model::State> initial_cloud(const Model& model,
                                                 const WindowOf<Model>& w,
                                                 std::size_t N, std::uint64_t seed,
                                                 std::uint64_t rep) {
  std::vector<typename Model::State> cloud;
  cloud.reserve(N);
  for (std::size_t i = 0; i < N; ++i) {
    auto rng = stream(seed, rep, 0, i, Purpose::kInitial);
    cloud.push_back(model.sample_initial(w, rng));
  }
  return cloud;
}

}  // namespace detail

template <class State>
struct StandardStep {
  std::vector<State> next;
  std::vector<double> log_g;  // log G_p at the previous cloud
  double lse_g = 0.0;
};

// One resample-mutate move zeta_{p} -> zeta_{p+1}. Draw order: all N
// ancestors from one stream, then the mutations in particle order, each from
// its own stream.
template <FeynmanKacModel Model>
StandardStep<typename Model::State> standard_step(
    const Model& model, const WindowOf<Model>& w, Time p,
    const std::vector<typename Model::State>& cloud, std::uint64_t seed,
    std::uint64_t rep) {
  const std::size_t N = cloud.size();
  StandardStep<typename Model::State> out;
  out.log_g.resize(N);
  for (std::size_t i = 0; i < N; ++i) out.log_g[i] = model.log_potential(w, p, cloud[i]);
  out.lse_g = log_sum_exp(out.log_g);
  auto rrng = detail::stream(seed, rep, p + 1, 0, Purpose::kResample);
  const auto anc = multinomial_resample(out.log_g, N, rrng);
  out.next.reserve(N);
  for (std::size_t i = 0; i < N; ++i) {
    auto mrng = detail::stream(seed, rep, p + 1, i, Purpose::kMutate);
    out.next.push_back(model.sample_mutation(w, p, cloud[anc[i]], mrng));
  }
  return out;
}

// Standard particle filter on an FK model. log_Z[n] = sum_{p<n} log mean G_p.
template <FeynmanKacModel Model>
RunResult<typename Model::State> bootstrap_run(const Model& model,
                                               const WindowOf<Model>& w,
                                               const RunOptions<typename Model::State>& opt) {
  detail::check_options(opt);
  w.require(0, opt.n + model.window_span() - 1);
  RunResult<typename Model::State> res;
  detail::init_trace(res.trace, opt);
  auto cloud = detail::initial_cloud(model, w, opt.N, opt.seed, opt.replicate);
  res.initial = cloud;
  const double log_n = std::log(static_cast<double>(opt.N));
  double log_z = 0.0;
  detail::record_tests(res.trace, opt, 0, cloud, log_z);
  for (Time p = 0; p < opt.n; ++p) {
    auto st = standard_step(model, w, p, cloud, opt.seed, opt.replicate);
    log_z += st.lse_g - log_n;
    cloud = std::move(st.next);
    res.trace.log_Z[static_cast<std::size_t>(p + 1)] = log_z;
    detail::record_tests(res.trace, opt, p + 1, cloud, log_z);
  }
  res.final = std::move(cloud);
  return res;
}

}  // namespace tpf
