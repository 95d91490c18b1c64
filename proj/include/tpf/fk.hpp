#pragma once

// Feynman-Kac model abstraction.
//
// A model supplies an initial law mu0, a mutation kernel M^{theta^t w}(x, .)
// and a strictly positive potential G^{theta^t w}(x), all indexed by time t
// within an observation window. Q = G * M is the unnormalized kernel whose
// semigroup gives the marginal likelihood; Phi is its normalized action on
// probability laws.

#include <cmath>
#include <concepts>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tpf/core/log_math.hpp"
#include "tpf/core/rng.hpp"
#include "tpf/core/window.hpp"

namespace tpf {

inline constexpr double kProbabilityTolerance = 1e-12;

template <class M>
using WindowOf = ObservationWindow<typename M::Observation>;

// window_span(): at step t, G and M read observation indices [t, t + span).
template <class M>
concept FeynmanKacModel =
    requires(const M& m, const WindowOf<M>& w, Time t,
             const typename M::State& x, RngStream& rng) {
      typename M::State;
      typename M::Observation;
      { m.sample_initial(w, rng) } -> std::convertible_to<typename M::State>;
      {
        m.sample_mutation(w, t, x, rng)
      } -> std::convertible_to<typename M::State>;
      { m.log_potential(w, t, x) } -> std::convertible_to<double>;
      { m.window_span() } -> std::convertible_to<Time>;
    };

// Finite state space {0, ..., k-1} with exact access to mu0, G and M.
template <class M>
concept FiniteFeynmanKacModel =
    FeynmanKacModel<M> && std::same_as<typename M::State, std::size_t> &&
    requires(const M& m, const WindowOf<M>& w, Time t, std::size_t x) {
      { m.num_states() } -> std::convertible_to<std::size_t>;
      { m.initial_law(w) } -> std::convertible_to<std::vector<double>>;
      { m.log_potential_vector(w, t) } -> std::convertible_to<std::vector<double>>;
      { m.transition_row(w, t, x) } -> std::convertible_to<std::vector<double>>;
    };

// Probability vector on a finite state space.
class FiniteLaw {
 public:
  FiniteLaw() = default;
  explicit FiniteLaw(std::vector<double> p) : p_(std::move(p)) {
    validate(p_, "FiniteLaw");
  }

  static void validate(std::span<const double> p, const std::string& what) {
    if (p.empty()) throw std::invalid_argument(what + ": empty support");
    double s = 0.0;
    for (double v : p) {
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument(what + ": negative or non-finite mass");
      s += v;
    }
    if (std::abs(s - 1.0) > kProbabilityTolerance)
      throw std::invalid_argument(what + ": masses sum to " +
                                  std::to_string(s) + ", not 1");
  }

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& probabilities() const noexcept { return p_; }

  double expect(std::span<const double> f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < p_.size(); ++i) s += p_[i] * f[i];
    return s;
  }

 private:
  std::vector<double> p_;
};

struct GaussianLaw {
  double mean = 0.0;
  double var = 1.0;

  GaussianLaw() = default;
  GaussianLaw(double m, double v) : mean(m), var(v) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("GaussianLaw: variance must be positive");
  }
};

template <class Law>
struct PhiResult {
  Law law;
  double log_normalizer = 0.0;  // log mu Q(1)
};

// x -> G_t(x) * sum_z M_t(x, z) phi(z).
template <FiniteFeynmanKacModel M>
std::vector<double> q_apply(const M& model, const WindowOf<M>& w, Time t,
                            std::span<const double> phi) {
  const std::size_t k = model.num_states();
  if (phi.size() != k)
    throw std::invalid_argument("q_apply: function size does not match X");
  const std::vector<double> logg = model.log_potential_vector(w, t);
  std::vector<double> out(k);
  for (std::size_t x = 0; x < k; ++x) {
    const std::vector<double> row = model.transition_row(w, t, x);
    double s = 0.0;
    for (std::size_t z = 0; z < k; ++z) s += row[z] * phi[z];
    out[x] = std::exp(logg[x]) * s;
  }
  return out;
}

// Log-domain q_apply: x -> log G_t(x) + log sum_z M_t(x, z) exp(log_phi(z)).
template <FiniteFeynmanKacModel M>
std::vector<double> log_q_apply(const M& model, const WindowOf<M>& w, Time t,
                                std::span<const double> log_phi) {
  const std::size_t k = model.num_states();
  if (log_phi.size() != k)
    throw std::invalid_argument("log_q_apply: function size does not match X");
  double m = kNegInf;
  for (double v : log_phi) m = std::max(m, v);
  std::vector<double> e(k);
  for (std::size_t z = 0; z < k; ++z) e[z] = std::exp(log_phi[z] - m);
  const std::vector<double> logg = model.log_potential_vector(w, t);
  std::vector<double> out(k);
  for (std::size_t x = 0; x < k; ++x) {
    const std::vector<double> row = model.transition_row(w, t, x);
    double s = 0.0;
    for (std::size_t z = 0; z < k; ++z) s += row[z] * e[z];
    out[x] = logg[x] + m + std::log(s);
  }
  return out;
}

// Phi_t(mu) = mu Q_t / mu Q_t(1), computed with the potential rescaled by
// its maximum so that the normalizer is carried in log domain.
template <FiniteFeynmanKacModel M>
PhiResult<FiniteLaw> phi_map(const M& model, const WindowOf<M>& w, Time t,
                             const FiniteLaw& mu) {
  const std::size_t k = model.num_states();
  if (mu.size() != k)
    throw std::invalid_argument("phi_map: law size does not match X");
  const std::vector<double> logg = model.log_potential_vector(w, t);
  double m = kNegInf;
  for (double v : logg) m = std::max(m, v);
  std::vector<double> weight(k);
  double total = 0.0;
  for (std::size_t x = 0; x < k; ++x) {
    weight[x] = mu[x] * std::exp(logg[x] - m);
    total += weight[x];
  }
  if (!(total > 0.0))
    throw std::domain_error("phi_map: total mass underflowed to zero");
  std::vector<double> out(k, 0.0);
  for (std::size_t x = 0; x < k; ++x) {
    if (weight[x] == 0.0) continue;
    const std::vector<double> row = model.transition_row(w, t, x);
    const double c = weight[x] / total;
    for (std::size_t z = 0; z < k; ++z) out[z] += c * row[z];
  }
  const double s = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& v : out) v /= s;
  return {FiniteLaw(std::move(out)), m + std::log(total)};
}

// Phi applied for steps t0, ..., t0 + n - 1; the log normalizer is the sum of
// the per-step normalizers, i.e. log mu Q_n(1).
template <class M, class Law>
PhiResult<Law> phi_compose(const M& model, const WindowOf<M>& w, Time t0,
                           Time n, Law mu) {
  double total = 0.0;
  for (Time t = t0; t < t0 + n; ++t) {
    auto r = phi_map(model, w, t, mu);
    total += r.log_normalizer;
    mu = std::move(r.law);
  }
  return {std::move(mu), total};
}

// Prediction laws eta_0 = mu0, eta_{t+1} = Phi_t(eta_t) for t < n, and the
// running log Z_t. Works for any model with a phi_map overload.
template <class Law>
struct ForwardPass {
  std::vector<Law> laws;       // size n + 1
  std::vector<double> log_Z;   // size n + 1, log_Z[0] = 0
};

template <class M, class Law>
ForwardPass<Law> forward_pass(const M& model, const WindowOf<M>& w, Time n,
                              Law mu0) {
  ForwardPass<Law> out;
  out.laws.reserve(static_cast<std::size_t>(n) + 1);
  out.log_Z.reserve(static_cast<std::size_t>(n) + 1);
  out.laws.push_back(std::move(mu0));
  out.log_Z.push_back(0.0);
  for (Time t = 0; t < n; ++t) {
    auto r = phi_map(model, w, t, out.laws.back());
    out.log_Z.push_back(out.log_Z.back() + r.log_normalizer);
    out.laws.push_back(std::move(r.law));
  }
  return out;
}

}  // namespace tpf
