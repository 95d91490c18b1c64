#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "tpf/core/log_math.hpp"
#include "tpf/fk.hpp"

namespace tpf {

// Hidden Markov model on k states with a finite observation alphabet.
// trans(x, z) = f(x, z); emit(x, y) = g(x, y).
struct FiniteHmmParams {
  std::vector<double> mu0;
  Eigen::MatrixXd trans;
  Eigen::MatrixXd emit;

  std::size_t num_states() const { return mu0.size(); }
  std::size_t alphabet_size() const {
    return static_cast<std::size_t>(emit.cols());
  }

  void validate() const {
    const auto k = static_cast<Eigen::Index>(mu0.size());
    FiniteLaw::validate(mu0, "FiniteHmmParams.mu0");
    if (trans.rows() != k || trans.cols() != k)
      throw std::invalid_argument("FiniteHmmParams.trans: must be k x k");
    if (emit.rows() != k || emit.cols() < 1)
      throw std::invalid_argument("FiniteHmmParams.emit: must be k x m");
    for (Eigen::Index x = 0; x < k; ++x) {
      std::vector<double> row(trans.row(x).begin(), trans.row(x).end());
      FiniteLaw::validate(row, "FiniteHmmParams.trans row " + std::to_string(x));
      std::vector<double> erow(emit.row(x).begin(), emit.row(x).end());
      FiniteLaw::validate(erow, "FiniteHmmParams.emit row " + std::to_string(x));
      for (double v : erow)
        if (!(v > 0.0))
          throw std::invalid_argument(
              "FiniteHmmParams.emit: emission probabilities must be strictly "
              "positive");
    }
  }

  // Finite-space analogue of the uniform mixing condition on M.
  bool strictly_positive_transitions() const { return (trans.array() > 0.0).all(); }
};

class FiniteHmm {
 public:
  using State = std::size_t;
  using Observation = int;
  using Window = ObservationWindow<Observation>;

  explicit FiniteHmm(FiniteHmmParams params) : p_(std::move(params)) {
    p_.validate();
    const std::size_t k = p_.num_states();
    mu0_cum_ = cumulative_sum(p_.mu0);
    trans_rows_.resize(k);
    trans_cum_.resize(k);
    log_emit_.resize(k);
    emit_cum_.resize(k);
    for (std::size_t x = 0; x < k; ++x) {
      const auto xi = static_cast<Eigen::Index>(x);
      trans_rows_[x].assign(p_.trans.row(xi).begin(), p_.trans.row(xi).end());
      trans_cum_[x] = cumulative_sum(trans_rows_[x]);
      std::vector<double> e(p_.emit.row(xi).begin(), p_.emit.row(xi).end());
      emit_cum_[x] = cumulative_sum(e);
      log_emit_[x].resize(e.size());
      for (std::size_t y = 0; y < e.size(); ++y) log_emit_[x][y] = std::log(e[y]);
    }
  }

  const FiniteHmmParams& params() const noexcept { return p_; }
  std::size_t num_states() const noexcept { return p_.num_states(); }
  Time window_span() const noexcept { return 1; }

  State sample_initial(const Window&, RngStream& rng) const {
    return sample_cumulative(mu0_cum_, rng.uniform());
  }

  State sample_mutation(const Window&, Time, State x, RngStream& rng) const {
    return sample_cumulative(trans_cum_[x], rng.uniform());
  }

  double log_potential(const Window& w, Time t, State x) const {
    return log_emit_[x][symbol(w, t)];
  }

  std::vector<double> initial_law(const Window&) const { return p_.mu0; }

  std::vector<double> log_potential_vector(const Window& w, Time t) const {
    const std::size_t y = symbol(w, t);
    std::vector<double> out(num_states());
    for (std::size_t x = 0; x < out.size(); ++x) out[x] = log_emit_[x][y];
    return out;
  }

  std::vector<double> transition_row(const Window&, Time, State x) const {
    return trans_rows_[x];
  }

  const std::vector<double>& transition_cumulative(State x) const {
    return trans_cum_[x];
  }

  Observation sample_observation(State x, RngStream& rng) const {
    return static_cast<Observation>(sample_cumulative(emit_cum_[x], rng.uniform()));
  }

  double log_emission(State x, Observation y) const {
    return log_emit_[x][static_cast<std::size_t>(y)];
  }

 private:
  std::size_t symbol(const Window& w, Time t) const {
    const int y = w.at(t);
    if (y < 0 || static_cast<std::size_t>(y) >= p_.alphabet_size())
      throw std::out_of_range("FiniteHmm: observation symbol " +
                              std::to_string(y) + " outside alphabet");
    return static_cast<std::size_t>(y);
  }

  FiniteHmmParams p_;
  std::vector<double> mu0_cum_;
  std::vector<std::vector<double>> trans_rows_;
  std::vector<std::vector<double>> trans_cum_;
  std::vector<std::vector<double>> log_emit_;
  std::vector<std::vector<double>> emit_cum_;
};

// Forward algorithm: prediction filters pi_0..pi_n and log Z_0..log Z_n.
inline ForwardPass<FiniteLaw> finite_forward(const FiniteHmm& model,
                                             const FiniteHmm::Window& w,
                                             Time n) {
  w.require(0, n);
  return forward_pass(model, w, n, FiniteLaw(model.params().mu0));
}

}  // namespace tpf
