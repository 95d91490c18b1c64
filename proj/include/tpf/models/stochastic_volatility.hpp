#pragma once

#include <cmath>
#include <stdexcept>

#include "tpf/core/log_math.hpp"
#include "tpf/fk.hpp"

namespace tpf {

// X_{t+1} = phi X_t + sigma V_t, Y_t = beta exp(X_t / 2) W_t, V, W ~ N(0, 1).
// X_0 drawn from the stationary law N(0, sigma^2 / (1 - phi^2)).
struct SvParams {
  double phi = 0.9702;
  double sigma = 0.178;
  double beta = 0.5992;

  void validate() const {
    if (!(phi > -1.0 && phi < 1.0))
      throw std::invalid_argument("SvParams: persistence must lie in (-1, 1)");
    if (!(sigma > 0.0)) throw std::invalid_argument("SvParams: sigma must be > 0");
    if (!(beta > 0.0)) throw std::invalid_argument("SvParams: beta must be > 0");
  }
  double stationary_var() const { return sigma * sigma / (1.0 - phi * phi); }
};

class StochasticVolatilityModel {
 public:
  using State = double;
  using Observation = double;
  using Window = ObservationWindow<Observation>;

  explicit StochasticVolatilityModel(SvParams p) : p_(p) {
    p_.validate();
    sd0_ = std::sqrt(p_.stationary_var());
    log_beta2_ = 2.0 * std::log(p_.beta);
  }

  const SvParams& params() const noexcept { return p_; }
  Time window_span() const noexcept { return 1; }

  double ar_coefficient() const noexcept { return p_.phi; }
  double state_noise_variance() const noexcept { return p_.sigma * p_.sigma; }
  GaussianLaw initial_gaussian() const { return {0.0, p_.stationary_var()}; }

  State sample_initial(const Window&, RngStream& rng) const {
    return sd0_ * rng.normal();
  }
  State sample_mutation(const Window&, Time, State x, RngStream& rng) const {
    return p_.phi * x + p_.sigma * rng.normal();
  }
  double log_potential(const Window& w, Time t, State x) const {
    return log_observation_density(x, w.at(t));
  }
  // log N(y; 0, beta^2 e^x)
  double log_observation_density(State x, Observation y) const {
    return -0.5 * (kLogTwoPi + log_beta2_ + x + y * y * std::exp(-x - log_beta2_));
  }
  Observation sample_observation(State x, RngStream& rng) const {
    return p_.beta * std::exp(0.5 * x) * rng.normal();
  }

 private:
  SvParams p_;
  double sd0_ = 1.0;
  double log_beta2_ = 0.0;
};

}  // namespace tpf
