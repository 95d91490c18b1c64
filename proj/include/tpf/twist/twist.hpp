#pragma once

// Twist functions psi. A twist supplies, for each time t of a window,
//   log_psi(w, t, x)          log psi_t(x), up to a per-time constant
//   log_q_psi(w, t, x)        log Q_t(psi_{t+1})(x), with psi_{t+1} carrying
//                             the same constant as log_psi(w, t + 1, .)
//   sample_twisted_mutation   a draw from M_t(x, .) psi_{t+1}(.) / M_t(psi_{t+1})(x)
//   log_initial_mass(w)       log mu0(psi_0)
//   sample_twisted_initial    a draw from mu0 psi_0 / mu0(psi_0)
//   lookahead()               observations psi_t reads: Y_t .. Y_{t+l-1}
// Consumers only ever use differences of logs taken at one time, so the
// per-time constants never reach an output.

#include <concepts>
#include <vector>

#include "tpf/fk.hpp"

namespace tpf {

template <class T, class M>
concept TwistFor =
    FeynmanKacModel<M> &&
    requires(const T& tw, const WindowOf<M>& w, Time t,
             const typename M::State& x, RngStream& rng) {
      { tw.lookahead() } -> std::convertible_to<Time>;
      { tw.log_psi(w, t, x) } -> std::convertible_to<double>;
      { tw.log_q_psi(w, t, x) } -> std::convertible_to<double>;
      {
        tw.sample_twisted_mutation(w, t, x, rng)
      } -> std::convertible_to<typename M::State>;
      { tw.log_initial_mass(w) } -> std::convertible_to<double>;
      {
        tw.sample_twisted_initial(w, rng)
      } -> std::convertible_to<typename M::State>;
    };

// Finite twists also expose the normalized twisted transition row.
template <class T, class M>
concept FiniteTwistFor =
    FiniteFeynmanKacModel<M> && TwistFor<T, M> &&
    requires(const T& tw, const WindowOf<M>& w, Time t, std::size_t x) {
      { tw.twisted_row(w, t, x) } -> std::convertible_to<std::vector<double>>;
    };

// psi == 1. log_q_psi is exactly log G, so every ratio that compares the
// two collapses bitwise.
template <FeynmanKacModel Model>
class ConstantTwist {
 public:
  using State = typename Model::State;
  using Window = WindowOf<Model>;

  explicit ConstantTwist(Model model) : model_(std::move(model)) {}

  Time lookahead() const noexcept { return 0; }
  double log_psi(const Window&, Time, const State&) const { return 0.0; }
  double log_q_psi(const Window& w, Time t, const State& x) const {
    return model_.log_potential(w, t, x);
  }
  State sample_twisted_mutation(const Window& w, Time t, const State& x,
                                RngStream& rng) const {
    return model_.sample_mutation(w, t, x, rng);
  }
  double log_initial_mass(const Window&) const { return 0.0; }
  State sample_twisted_initial(const Window& w, RngStream& rng) const {
    return model_.sample_initial(w, rng);
  }
  std::vector<double> twisted_row(const Window& w, Time t, std::size_t x) const
    requires FiniteFeynmanKacModel<Model>
  {
    return model_.transition_row(w, t, x);
  }

 private:
  Model model_;
};

// log psi + c at every (t, x). Used to check that outputs ignore the
// constant.
template <class Twist>
class ShiftedTwist {
 public:
  ShiftedTwist(Twist base, double c) : base_(std::move(base)), c_(c) {}

  Time lookahead() const { return base_.lookahead(); }
  template <class W, class S>
  double log_psi(const W& w, Time t, const S& x) const {
    return base_.log_psi(w, t, x) + c_;
  }
  template <class W, class S>
  double log_q_psi(const W& w, Time t, const S& x) const {
    return base_.log_q_psi(w, t, x) + c_;
  }
  template <class W, class S>
  S sample_twisted_mutation(const W& w, Time t, const S& x, RngStream& rng) const {
    return base_.sample_twisted_mutation(w, t, x, rng);
  }
  template <class W>
  double log_initial_mass(const W& w) const {
    return base_.log_initial_mass(w) + c_;
  }
  template <class W>
  auto sample_twisted_initial(const W& w, RngStream& rng) const {
    return base_.sample_twisted_initial(w, rng);
  }
  template <class W>
  std::vector<double> twisted_row(const W& w, Time t, std::size_t x) const {
    return base_.twisted_row(w, t, x);
  }

 private:
  Twist base_;
  double c_;
};

}  // namespace tpf
