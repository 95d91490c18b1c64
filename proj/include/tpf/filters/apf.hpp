#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "tpf/filters/bootstrap.hpp"
#include "tpf/twist/twist.hpp"

namespace tpf {

// The FK model an auxiliary particle filter runs on, for a weight function r
// given as a twist: mu0^r ~ r_0 mu0, M^r ~ M r_{t+1},
// G^r(x) = Q_t(r_{t+1})(x) / r_t(x).
template <FeynmanKacModel Model, class R>
  requires TwistFor<R, Model>
class ApfModel {
 public:
  using State = typename Model::State;
  using Observation = typename Model::Observation;
  using Window = WindowOf<Model>;

  ApfModel(const Model& model, const R& r) : model_(&model), r_(&r) {}

  Time window_span() const {
    return std::max<Time>(model_->window_span(), r_->lookahead() + 1);
  }
  State sample_initial(const Window& w, RngStream& rng) const {
    return r_->sample_twisted_initial(w, rng);
  }
  State sample_mutation(const Window& w, Time t, const State& x, RngStream& rng) const {
    return r_->sample_twisted_mutation(w, t, x, rng);
  }
  double log_potential(const Window& w, Time t, const State& x) const {
    return r_->log_q_psi(w, t, x) - r_->log_psi(w, t, x);
  }

 private:
  const Model* model_;
  const R* r_;
};

// log Z_check[n] = log mu0(r_0) + log mean_i 1/r_n(zeta_n^i) + sum_{p<n} log mean G^r_p.
// eta_phi is the plain particle average; aux["weighted_<name>"] holds
// sum phi/r / sum 1/r, the consistent prediction-filter estimate, and
// gamma_phi = Z_check * weighted. aux["log_G_osc"][n] is max - min of log G^r_n
// over the cloud.
template <FeynmanKacModel Model, class R>
  requires TwistFor<R, Model>
RunResult<typename Model::State> apf_run(const Model& model, const R& r,
                                         const WindowOf<Model>& w,
                                         const RunOptions<typename Model::State>& opt) {
  using State = typename Model::State;
  detail::check_options(opt);
  const ApfModel<Model, R> apf(model, r);
  w.require(0, opt.n + std::max<Time>(r.lookahead(), model.window_span() - 1));
  RunResult<State> res;
  detail::init_trace(res.trace, opt);
  const auto len = static_cast<std::size_t>(opt.n) + 1;
  auto& bold = res.trace.aux["log_Z_bold"];
  auto& osc = res.trace.aux["log_G_osc"];
  bold.assign(len, 0.0);
  osc.assign(len, 0.0);
  std::vector<std::vector<double>*> weighted;
  for (const auto& tf : opt.tests) {
    auto& v = res.trace.aux["weighted_" + tf.name];
    v.assign(len, 0.0);
    weighted.push_back(&v);
  }
  const double log_mass0 = r.log_initial_mass(w);
  const double log_n = std::log(static_cast<double>(opt.N));

  auto cloud = detail::initial_cloud(apf, w, opt.N, opt.seed, opt.replicate);
  res.initial = cloud;
  double log_bold = 0.0;

  const auto record = [&](Time n) {
    const auto k = static_cast<std::size_t>(n);
    std::vector<double> neg_lr(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) neg_lr[i] = -r.log_psi(w, n, cloud[i]);
    const double lse = log_sum_exp(neg_lr);
    const double log_check = log_mass0 + (lse - log_n) + log_bold;
    res.trace.log_Z[k] = log_check;
    bold[k] = log_bold;
    for (std::size_t j = 0; j < opt.tests.size(); ++j) {
      double s = 0.0, plain = 0.0;
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double f = opt.tests[j].f(cloud[i]);
        s += f * std::exp(neg_lr[i] - lse);
        plain += f;
      }
      (*weighted[j])[k] = s;
      res.trace.eta_phi[j][k] = plain / static_cast<double>(cloud.size());
      res.trace.gamma_phi[j][k] = s * std::exp(log_check);
    }
  };

  record(0);
  for (Time p = 0; p < opt.n; ++p) {
    auto st = standard_step(apf, w, p, cloud, opt.seed, opt.replicate);
    const auto [lo, hi] = std::minmax_element(st.log_g.begin(), st.log_g.end());
    osc[static_cast<std::size_t>(p)] = *hi - *lo;
    log_bold += st.lse_g - log_n;
    cloud = std::move(st.next);
    record(p + 1);
  }
  res.final = std::move(cloud);
  return res;
}

}  // namespace tpf
