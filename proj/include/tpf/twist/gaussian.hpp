#pragma once

// Gaussian twists for scalar AR(1) state dynamics X' = a X + N(0, q):
// psi_t(x) = exp(-P_t x^2 / 2 + B_t x). Each observation enters through a
// quadratic pseudo-observation (precision, info); psi_t collects those at
// t .. t+ell-1 by the backward information filter.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tpf/core/log_math.hpp"
#include "tpf/fk.hpp"
#include "tpf/models/linear_gaussian.hpp"
#include "tpf/models/stochastic_volatility.hpp"

namespace tpf {

struct PseudoObservation {
  double precision = 0.0;  // coefficient of -x^2/2
  double info = 0.0;       // coefficient of x
};

struct Quadratic {
  double P = 0.0;
  double B = 0.0;
  bool is_zero() const noexcept { return P == 0.0 && B == 0.0; }
};

// log of int N(z; m, q) exp(-P z^2 / 2 + B z) dz
inline double log_gaussian_twist_integral(double m, double q, const Quadratic& f) {
  if (f.is_zero()) return 0.0;
  const double tau = 1.0 / q + f.P;
  const double c = m / q + f.B;
  return -0.5 * std::log(q * tau) + c * c / (2.0 * tau) - m * m / (2.0 * q);
}

// Mean and variance of N(z; m, q) exp(-P z^2 / 2 + B z), normalized.
inline GaussianLaw gaussian_twisted_law(double m, double q, const Quadratic& f) {
  const double tau = 1.0 / q + f.P;
  return {(m / q + f.B) / tau, 1.0 / tau};
}

// Pushes x_{t+1} -> f(x_{t+1}) through the dynamics: x_t -> E f(a x_t + V).
inline Quadratic propagate_back(const Quadratic& f, double a, double q) {
  const double d = 1.0 + q * f.P;
  return {a * a * f.P / d, a * f.B / d};
}

// Model needs ar_coefficient(), state_noise_variance(), initial_gaussian()
// and log_potential; State = double.
template <class Model>
class GaussianTwist {
 public:
  using State = double;
  using Window = WindowOf<Model>;

  GaussianTwist(Model model, Window w, const std::vector<PseudoObservation>& obs,
                Time ell)
      : model_(std::move(model)), w_(std::move(w)), ell_(ell) {
    const Time len = w_.length();
    if (ell < 0) throw std::invalid_argument("GaussianTwist: ell must be >= 0");
    if (static_cast<Time>(obs.size()) != len)
      throw std::invalid_argument("GaussianTwist: one pseudo-observation per window entry");
    if (len - ell + 1 < 1) throw WindowError(w_.origin() + ell - 1, w_.origin(), w_.end());
    const double a = model_.ar_coefficient();
    const double q = model_.state_noise_variance();
    table_.resize(static_cast<std::size_t>(len - ell + 1));
    for (std::size_t s = 0; s < table_.size(); ++s) {
      Quadratic f;
      for (Time j = static_cast<Time>(s) + ell - 1; j >= static_cast<Time>(s); --j) {
        f = propagate_back(f, a, q);
        f.P += obs[static_cast<std::size_t>(j)].precision;
        f.B += obs[static_cast<std::size_t>(j)].info;
      }
      table_[s] = f;
    }
  }

  Time lookahead() const noexcept { return ell_; }
  const Quadratic& coefficients(const Window& w, Time t) const {
    return table_[psi_pos(w, t)];
  }

  double log_psi(const Window& w, Time t, State x) const {
    const Quadratic& f = table_[psi_pos(w, t)];
    return -0.5 * f.P * x * x + f.B * x;
  }
  double log_q_psi(const Window& w, Time t, State x) const {
    const Quadratic& f = table_[q_pos(w, t)];
    return model_.log_potential(w, t, x) +
           log_gaussian_twist_integral(model_.ar_coefficient() * x,
                                       model_.state_noise_variance(), f);
  }
  State sample_twisted_mutation(const Window& w, Time t, State x,
                                RngStream& rng) const {
    const Quadratic& f = table_[q_pos(w, t)];
    if (f.is_zero()) return model_.sample_mutation(w, t, x, rng);
    const GaussianLaw law = gaussian_twisted_law(model_.ar_coefficient() * x,
                                                 model_.state_noise_variance(), f);
    return law.mean + std::sqrt(law.var) * rng.normal();
  }
  double log_initial_mass(const Window& w) const {
    const GaussianLaw mu0 = model_.initial_gaussian();
    return log_gaussian_twist_integral(mu0.mean, mu0.var, table_[psi_pos(w, 0)]);
  }
  State sample_twisted_initial(const Window& w, RngStream& rng) const {
    const Quadratic& f = table_[psi_pos(w, 0)];
    if (f.is_zero()) return model_.sample_initial(w, rng);
    const GaussianLaw mu0 = model_.initial_gaussian();
    const GaussianLaw law = gaussian_twisted_law(mu0.mean, mu0.var, f);
    return law.mean + std::sqrt(law.var) * rng.normal();
  }

 private:
  void check_path(const Window& w) const {
    if (!w.same_path(w_))
      throw std::invalid_argument(
          "GaussianTwist: window is not a shift of the one the twist was built for");
  }
  std::size_t psi_pos(const Window& w, Time t) const {
    check_path(w);
    const Time s = w.raw_index(t);
    if (s < 0) throw WindowError(t, w.origin(), w.end());
    if (s >= static_cast<Time>(table_.size()))
      throw WindowError(ell_ >= 1 ? t + ell_ - 1 : t - 1, w.origin(), w.end());
    return static_cast<std::size_t>(s);
  }
  std::size_t q_pos(const Window& w, Time t) const {
    check_path(w);
    const Time s = w.raw_index(t);
    if (s < 0) throw WindowError(t, w.origin(), w.end());
    if (s + 1 >= static_cast<Time>(table_.size()))
      throw WindowError(t + ell_, w.origin(), w.end());
    return static_cast<std::size_t>(s + 1);
  }

  Model model_;
  Window w_;
  Time ell_;
  std::vector<Quadratic> table_;
};

// Exact lag-ell twist: the LG likelihood term is already quadratic.
inline GaussianTwist<LinearGaussianModel> lg_lag_twist(
    const LinearGaussianParams& params, const LinearGaussianModel::Window& w,
    Time ell) {
  std::vector<PseudoObservation> obs;
  obs.reserve(w.values().size());
  for (double y : w.values()) obs.push_back({1.0 / params.r_obs, y / params.r_obs});
  return {LinearGaussianModel(params), w, obs, ell};
}

// Laplace approximation of the SV observation density in x. The expansion
// point is the mode of log g(x, y) + log N(x; 0, stationary variance); the
// curvature of log g there gives the precision, floored so psi stays
// bounded.
inline PseudoObservation sv_laplace_pseudo_observation(const SvParams& p, double y) {
  constexpr double kMinPrecision = 1e-6;
  const double c = y * y / (2.0 * p.beta * p.beta);
  const double v = p.stationary_var();
  double x = 0.0;
  for (int it = 0; it < 100; ++it) {
    const double ce = c * std::exp(-x);
    const double d1 = -0.5 + ce - x / v;
    const double d2 = -ce - 1.0 / v;
    const double step = std::clamp(d1 / d2, -5.0, 5.0);
    x -= step;
    if (std::abs(step) < 1e-12) break;
  }
  const double ce = c * std::exp(-x);
  const double prec = std::max(ce, kMinPrecision);
  const double d1 = -0.5 + ce;
  return {prec, d1 + prec * x};
}

inline GaussianTwist<StochasticVolatilityModel> sv_approx_twist(
    const SvParams& params, const StochasticVolatilityModel::Window& w, Time ell) {
  std::vector<PseudoObservation> obs;
  obs.reserve(w.values().size());
  for (double y : w.values()) obs.push_back(sv_laplace_pseudo_observation(params, y));
  return {StochasticVolatilityModel(params), w, obs, ell};
}

}  // namespace tpf
