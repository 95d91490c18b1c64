#pragma once

#include <cmath>
#include <vector>

#include "tpf/filters/bootstrap.hpp"
#include "tpf/twist/twist.hpp"

namespace tpf {

namespace detail {

// L independent chains, no resampling. Each chain's log weight accumulates
// log G_p(X_p) under the model dynamics, or
// log Q_p(psi_{p+1})(X_p) - log psi_{p+1}(X_{p+1}) under a twisted proposal.
template <FeynmanKacModel Model, class Twist>
RunResult<typename Model::State> sis_impl(const Model& model, const Twist* twist,
                                          const WindowOf<Model>& w,
                                          const RunOptions<typename Model::State>& opt) {
  detail::check_options(opt);
  const Time ell = twist ? twist->lookahead() : 0;
  w.require(0, opt.n + std::max<Time>(ell, model.window_span() - 1));
  const std::size_t L = opt.N;
  RunResult<typename Model::State> res;
  detail::init_trace(res.trace, opt);
  auto chains = detail::initial_cloud(model, w, L, opt.seed, opt.replicate);
  res.initial = chains;
  std::vector<double> logw(L, 0.0);
  const double log_l = std::log(static_cast<double>(L));

  const auto record = [&](Time n) {
    const auto k = static_cast<std::size_t>(n);
    const double lse = log_sum_exp(logw);
    res.trace.log_Z[k] = lse - log_l;
    for (std::size_t j = 0; j < opt.tests.size(); ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < L; ++i) s += opt.tests[j].f(chains[i]) * std::exp(logw[i] - lse);
      res.trace.eta_phi[j][k] = s;
      res.trace.gamma_phi[j][k] = s * std::exp(lse - log_l);
    }
  };

  record(0);
  for (Time p = 0; p < opt.n; ++p) {
    for (std::size_t i = 0; i < L; ++i) {
      auto rng = detail::stream(opt.seed, opt.replicate, p + 1, i, Purpose::kMutate);
      if (twist) {
        logw[i] += twist->log_q_psi(w, p, chains[i]);
        chains[i] = twist->sample_twisted_mutation(w, p, chains[i], rng);
        logw[i] -= twist->log_psi(w, p + 1, chains[i]);
      } else {
        logw[i] += model.log_potential(w, p, chains[i]);
        chains[i] = model.sample_mutation(w, p, chains[i], rng);
      }
    }
    record(p + 1);
  }
  res.trace.aux["chain_log_w"] = logw;
  res.final = std::move(chains);
  return res;
}

}  // namespace detail

template <FeynmanKacModel Model>
RunResult<typename Model::State> sis_run(const Model& model, const WindowOf<Model>& w,
                                         const RunOptions<typename Model::State>& opt) {
  return detail::sis_impl<Model, ConstantTwist<Model>>(model, nullptr, w, opt);
}

template <FeynmanKacModel Model, class Twist>
  requires TwistFor<Twist, Model>
RunResult<typename Model::State> sis_run(const Model& model, const Twist& proposal,
                                         const WindowOf<Model>& w,
                                         const RunOptions<typename Model::State>& opt) {
  return detail::sis_impl(model, &proposal, w, opt);
}

}  // namespace tpf
