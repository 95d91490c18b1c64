#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tpf/core/log_math.hpp"
#include "tpf/fk.hpp"

namespace tpf {

// X_{t+1} = a X_t + V_t, Y_t = X_t + W_t, V ~ N(0, q), W ~ N(0, r_obs),
// X_0 ~ N(mu0_mean, mu0_var).
struct LinearGaussianParams {
  double a = 0.9;
  double q = 1.0;
  double r_obs = 1.0;
  double mu0_mean = 0.0;
  double mu0_var = 1.0 / (1.0 - 0.81);

  // Initial law set to the stationary law N(0, q / (1 - a^2)).
  static LinearGaussianParams stationary(double a, double q, double r_obs) {
    if (!(std::abs(a) < 1.0))
      throw std::invalid_argument(
          "LinearGaussianParams::stationary: requires |a| < 1");
    return {a, q, r_obs, 0.0, q / (1.0 - a * a)};
  }

  void validate() const {
    if (!(q > 0.0)) throw std::invalid_argument("LinearGaussianParams: q must be > 0");
    if (!(r_obs > 0.0))
      throw std::invalid_argument("LinearGaussianParams: r_obs must be > 0");
    if (!(mu0_var > 0.0))
      throw std::invalid_argument("LinearGaussianParams: initial variance must be > 0");
    if (!std::isfinite(a) || !std::isfinite(mu0_mean))
      throw std::invalid_argument("LinearGaussianParams: non-finite parameter");
  }
};

class LinearGaussianModel {
 public:
  using State = double;
  using Observation = double;
  using Window = ObservationWindow<Observation>;

  explicit LinearGaussianModel(LinearGaussianParams p) : p_(p) {
    p_.validate();
    sd_q_ = std::sqrt(p_.q);
    sd_r_ = std::sqrt(p_.r_obs);
    sd_0_ = std::sqrt(p_.mu0_var);
  }

  const LinearGaussianParams& params() const noexcept { return p_; }
  Time window_span() const noexcept { return 1; }

  double ar_coefficient() const noexcept { return p_.a; }
  double state_noise_variance() const noexcept { return p_.q; }
  GaussianLaw initial_gaussian() const { return {p_.mu0_mean, p_.mu0_var}; }

  State sample_initial(const Window&, RngStream& rng) const {
    return p_.mu0_mean + sd_0_ * rng.normal();
  }
  State sample_mutation(const Window&, Time, State x, RngStream& rng) const {
    return p_.a * x + sd_q_ * rng.normal();
  }
  double log_potential(const Window& w, Time t, State x) const {
    return log_normal_pdf(w.at(t), x, p_.r_obs);
  }
  double log_observation_density(State x, Observation y) const {
    return log_normal_pdf(y, x, p_.r_obs);
  }
  Observation sample_observation(State x, RngStream& rng) const {
    return x + sd_r_ * rng.normal();
  }

 private:
  LinearGaussianParams p_;
  double sd_q_ = 1.0;
  double sd_r_ = 1.0;
  double sd_0_ = 1.0;
};

// Kalman predict-update: Phi_t(N(m, v)) and log N(y_t; m, v + r).
inline PhiResult<GaussianLaw> phi_map(const LinearGaussianModel& model,
                                      const LinearGaussianModel::Window& w,
                                      Time t, const GaussianLaw& mu) {
  const auto& p = model.params();
  const double y = w.at(t);
  const double s = mu.var + p.r_obs;
  const double gain = mu.var / s;
  const double mf = mu.mean + gain * (y - mu.mean);
  const double vf = (1.0 - gain) * mu.var;
  return {GaussianLaw(p.a * mf, p.a * p.a * vf + p.q),
          log_normal_pdf(y, mu.mean, s)};
}

struct KalmanResult {
  std::vector<double> pred_mean;  // mean of pi_t, t = 0..n
  std::vector<double> pred_var;
  std::vector<double> log_Z;      // log Z_t, t = 0..n
  double log_Z_n() const { return log_Z.back(); }
};

inline KalmanResult kalman_run(const LinearGaussianParams& params,
                               const LinearGaussianModel::Window& w, Time n) {
  LinearGaussianModel model(params);
  w.require(0, n);
  const auto pass = forward_pass(model, w, n, model.initial_gaussian());
  KalmanResult out;
  out.log_Z = pass.log_Z;
  for (const auto& law : pass.laws) {
    out.pred_mean.push_back(law.mean);
    out.pred_var.push_back(law.var);
  }
  return out;
}

}  // namespace tpf
