#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "tpf/filters/bootstrap.hpp"
#include "tpf/twist/twist.hpp"

namespace tpf {

template <class State>
struct TwistedStep {
  std::vector<State> next;
  double lse_g = 0.0;    // log sum_i G_p(zeta_p^i)
  double lse_q = 0.0;    // log sum_i Q_p(psi_{p+1})(zeta_p^i)
  double lse_psi = 0.0;  // log sum_i psi_{p+1}(zeta_{p+1}^i)
  std::size_t K = 0;
  std::size_t A = 0;
};

// zeta_p -> zeta_{p+1} under the psi-twisted particle kernel, as a mixture:
// N standard draws, then coordinate K (uniform) is replaced by a draw from
// M_p(zeta_p^A, .) psi_{p+1} with A proportional to Q_p(psi_{p+1}).
template <FeynmanKacModel Model, class Twist>
  requires TwistFor<Twist, Model>
TwistedStep<typename Model::State> twisted_step(
    const Model& model, const Twist& twist, const WindowOf<Model>& w, Time p,
    const std::vector<typename Model::State>& cloud, std::uint64_t seed,
    std::uint64_t rep) {
  const std::size_t N = cloud.size();
  auto st = standard_step(model, w, p, cloud, seed, rep);
  TwistedStep<typename Model::State> out;
  out.lse_g = st.lse_g;
  out.next = std::move(st.next);

  std::vector<double> lq(N);
  for (std::size_t i = 0; i < N; ++i) lq[i] = twist.log_q_psi(w, p, cloud[i]);
  out.lse_q = log_sum_exp(lq);
  auto srng = detail::stream(seed, rep, p + 1, 0, Purpose::kTwistSelect);
  out.K = srng.below(N);
  std::vector<double> prob(N);
  for (std::size_t i = 0; i < N; ++i) prob[i] = std::exp(lq[i] - out.lse_q);
  out.A = sample_cumulative(cumulative_sum(prob), srng.uniform());
  auto trng = detail::stream(seed, rep, p + 1, 0, Purpose::kTwistMutate);
  out.next[out.K] = twist.sample_twisted_mutation(w, p, cloud[out.A], trng);

  std::vector<double> lpsi(N);
  for (std::size_t i = 0; i < N; ++i) lpsi[i] = twist.log_psi(w, p + 1, out.next[i]);
  out.lse_psi = log_sum_exp(lpsi);
  return out;
}

// Twisted particle algorithm. zeta_0 ~ mu0 untwisted;
// log_Z[n] = sum_{p<n} [log sum Q_p(psi_{p+1})(zeta_p) - log sum psi_{p+1}(zeta_{p+1})],
// log_phi[n] = that increment minus the standard one. aux["log_Z_standard"]
// carries the standard functional of the same particles.
template <FeynmanKacModel Model, class Twist>
  requires TwistFor<Twist, Model>
RunResult<typename Model::State> twisted_run(const Model& model, const Twist& twist,
                                             const WindowOf<Model>& w,
                                             const RunOptions<typename Model::State>& opt) {
  detail::check_options(opt);
  w.require(0, opt.n + std::max<Time>(twist.lookahead(), model.window_span() - 1));
  RunResult<typename Model::State> res;
  detail::init_trace(res.trace, opt);
  auto& std_z = res.trace.aux["log_Z_standard"];
  std_z.assign(static_cast<std::size_t>(opt.n) + 1, 0.0);
  auto cloud = detail::initial_cloud(model, w, opt.N, opt.seed, opt.replicate);
  res.initial = cloud;
  const double log_n = std::log(static_cast<double>(opt.N));
  double log_z = 0.0, log_z_std = 0.0;
  detail::record_tests(res.trace, opt, 0, cloud, log_z);
  for (Time p = 0; p < opt.n; ++p) {
    auto st = twisted_step(model, twist, w, p, cloud, opt.seed, opt.replicate);
    const double inc = st.lse_q - st.lse_psi;
    const double std_inc = st.lse_g - log_n;
    log_z += inc;
    log_z_std += std_inc;
    cloud = std::move(st.next);
    const auto k = static_cast<std::size_t>(p + 1);
    res.trace.log_Z[k] = log_z;
    res.trace.log_phi[k] = inc - std_inc;
    std_z[k] = log_z_std;
    detail::record_tests(res.trace, opt, p + 1, cloud, log_z);
  }
  res.final = std::move(cloud);
  return res;
}

}  // namespace tpf
