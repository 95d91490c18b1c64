#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "tpf/core/log_math.hpp"
#include "tpf/fk.hpp"
#include "tpf/twist/twist.hpp"

namespace tpf {

// Twist on a finite state space given by a table of log psi per buffer
// position. Built once for one observation path; any shift of that window can
// query it since lookups go through raw_index.
//
// extent: number of observations psi_t reads (Y_t .. Y_{t+extent-1}). The
// table must then hold length - extent + 1 positions.
template <FiniteFeynmanKacModel Model>
class TabulatedTwist {
 public:
  using State = std::size_t;
  using Window = WindowOf<Model>;

  TabulatedTwist(Model model, Window w, std::vector<std::vector<double>> log_psi,
                 Time extent)
      : model_(std::move(model)), w_(std::move(w)), extent_(extent),
        log_psi_(std::move(log_psi)) {
    const std::size_t k = model_.num_states();
    const Time len = w_.length();
    if (extent_ < 0) throw std::invalid_argument("TabulatedTwist: extent must be >= 0");
    if (static_cast<Time>(log_psi_.size()) != len - extent_ + 1)
      throw std::invalid_argument("TabulatedTwist: table needs length - extent + 1 rows");
    for (const auto& v : log_psi_) {
      if (v.size() != k) throw std::invalid_argument("TabulatedTwist: row size != k");
      for (double x : v)
        if (!std::isfinite(x))
          throw std::invalid_argument("TabulatedTwist: psi must be strictly positive and finite");
    }
    const std::size_t npos = log_psi_.empty() ? 0 : log_psi_.size() - 1;
    log_q_.resize(npos);
    rows_.resize(npos);
    cum_.resize(npos);
    for (std::size_t s = 0; s < npos; ++s) {
      const Time t = w_.origin() + static_cast<Time>(s);
      const auto& next = log_psi_[s + 1];
      const double m = *std::max_element(next.begin(), next.end());
      std::vector<double> e(k);
      for (std::size_t z = 0; z < k; ++z) e[z] = std::exp(next[z] - m);
      const std::vector<double> logg = model_.log_potential_vector(w_, t);
      log_q_[s].resize(k);
      rows_[s].resize(k);
      cum_[s].resize(k);
      for (std::size_t x = 0; x < k; ++x) {
        std::vector<double> r = model_.transition_row(w_, t, x);
        double total = 0.0;
        for (std::size_t z = 0; z < k; ++z) {
          r[z] *= e[z];
          total += r[z];
        }
        log_q_[s][x] = logg[x] + m + std::log(total);
        for (double& v : r) v /= total;
        cum_[s][x] = cumulative_sum(r);
        rows_[s][x] = std::move(r);
      }
    }
  }

  Time lookahead() const noexcept { return extent_; }
  const Window& window() const noexcept { return w_; }

  double log_psi(const Window& w, Time t, State x) const {
    return log_psi_[psi_pos(w, t)][x];
  }
  double log_q_psi(const Window& w, Time t, State x) const {
    return log_q_[q_pos(w, t)][x];
  }
  std::vector<double> twisted_row(const Window& w, Time t, State x) const {
    return rows_[q_pos(w, t)][x];
  }
  State sample_twisted_mutation(const Window& w, Time t, State x,
                                RngStream& rng) const {
    return sample_cumulative(cum_[q_pos(w, t)][x], rng.uniform());
  }

  double log_initial_mass(const Window& w) const {
    const auto& lp = log_psi_[psi_pos(w, 0)];
    const std::vector<double> mu0 = model_.initial_law(w);
    double m = *std::max_element(lp.begin(), lp.end());
    double s = 0.0;
    for (std::size_t x = 0; x < lp.size(); ++x) s += mu0[x] * std::exp(lp[x] - m);
    return m + std::log(s);
  }
  State sample_twisted_initial(const Window& w, RngStream& rng) const {
    const auto& lp = log_psi_[psi_pos(w, 0)];
    std::vector<double> p = model_.initial_law(w);
    const double m = *std::max_element(lp.begin(), lp.end());
    for (std::size_t x = 0; x < p.size(); ++x) p[x] *= std::exp(lp[x] - m);
    return sample_cumulative(cumulative_sum(p), rng.uniform());
  }

  // Raw table access by absolute time in the construction window.
  const std::vector<double>& log_psi_at(Time t) const {
    return log_psi_[psi_pos(w_, t)];
  }

 private:
  void check_path(const Window& w) const {
    if (!w.same_path(w_))
      throw std::invalid_argument(
          "TabulatedTwist: window is not a shift of the one the tables were built for");
  }
  std::size_t psi_pos(const Window& w, Time t) const {
    check_path(w);
    const Time s = w.raw_index(t);
    if (s < 0) throw WindowError(t, w.origin(), w.end());
    if (s >= static_cast<Time>(log_psi_.size()))
      throw WindowError(extent_ >= 1 ? t + extent_ - 1 : t - 1, w.origin(), w.end());
    return static_cast<std::size_t>(s);
  }
  std::size_t q_pos(const Window& w, Time t) const {
    check_path(w);
    const Time s = w.raw_index(t);
    if (s < 0) throw WindowError(t, w.origin(), w.end());
    if (s >= static_cast<Time>(log_q_.size()))
      throw WindowError(t + extent_, w.origin(), w.end());
    return static_cast<std::size_t>(s);
  }

  Model model_;
  Window w_;
  Time extent_;
  std::vector<std::vector<double>> log_psi_;
  std::vector<std::vector<double>> log_q_;
  std::vector<std::vector<std::vector<double>>> rows_;
  std::vector<std::vector<std::vector<double>>> cum_;
};

// log Q_ell(1) started at raw position s, shifted so that its max is 0.
template <FiniteFeynmanKacModel Model>
std::vector<double> lag_log_psi(const Model& model, const WindowOf<Model>& w,
                                Time t, Time ell) {
  std::vector<double> v(model.num_states(), 0.0);
  for (Time j = t + ell - 1; j >= t; --j) v = log_q_apply(model, w, j, v);
  const double m = *std::max_element(v.begin(), v.end());
  for (double& x : v) x -= m;
  return v;
}

// psi_t proportional to Q_ell(1) from t, the likelihood of Y_t .. Y_{t+ell-1}
// given X_t. ell = 0 gives psi == 1.
template <FiniteFeynmanKacModel Model>
TabulatedTwist<Model> lag_twist_finite(const Model& model,
                                       const WindowOf<Model>& w, Time ell) {
  if (ell < 0) throw std::invalid_argument("lag_twist_finite: ell must be >= 0");
  const Time len = w.length();
  if (len - ell + 1 < 1) throw WindowError(w.origin() + ell - 1, w.origin(), w.end());
  std::vector<std::vector<double>> table(static_cast<std::size_t>(len - ell + 1));
  for (Time s = 0; s < static_cast<Time>(table.size()); ++s)
    table[static_cast<std::size_t>(s)] = lag_log_psi(model, w, w.origin() + s, ell);
  return TabulatedTwist<Model>(model, w, std::move(table), ell);
}

}  // namespace tpf
