#pragma once

// Generalized eigen-triple (eta, h, lambda) of Q on a finite window:
//   eta_t Q_t = lambda_t eta_{t+1},  Q_t(h_{t+1}) = lambda_t h_t,  eta_t(h_t) = 1.
// h comes from the backward recursion u_t ~ Q_t(u_{t+1}) run from the right
// edge, eta from forward Phi steps from the left edge. Both are started twice
// from different points; the gap between the two runs certifies that the
// edges have been forgotten.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tpf/core/log_math.hpp"
#include "tpf/fk.hpp"
#include "tpf/twist/tabulated.hpp"

namespace tpf {

class EigenConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EigenTriple {
  Time first = 0;  // evaluation range [first, last], absolute window times
  Time last = 0;
  std::vector<std::vector<double>> h;
  std::vector<std::vector<double>> eta;
  std::vector<double> lambda;
  std::vector<double> log_lambda;
  double Lambda_hat = 0.0;  // mean of log lambda over the range
  double h_gap = 0.0;       // certificate values actually reached
  double eta_gap = 0.0;

  std::size_t idx(Time t) const {
    if (t < first || t > last)
      throw std::out_of_range("EigenTriple: time " + std::to_string(t) +
                              " outside evaluation range");
    return static_cast<std::size_t>(t - first);
  }
  const std::vector<double>& h_at(Time t) const { return h[idx(t)]; }
  const std::vector<double>& eta_at(Time t) const { return eta[idx(t)]; }
  double lambda_at(Time t) const { return lambda[idx(t)]; }
};

// log u for buffer positions 0..length, u_length = exp(terminal_log), each
// entry shifted so its max is 0.
template <FiniteFeynmanKacModel Model>
std::vector<std::vector<double>> backward_log_u(const Model& model,
                                                const WindowOf<Model>& w,
                                                std::vector<double> terminal_log) {
  const auto len = static_cast<std::size_t>(w.length());
  std::vector<std::vector<double>> out(len + 1);
  out[len] = std::move(terminal_log);
  for (std::size_t s = len; s-- > 0;) {
    auto v = log_q_apply(model, w, w.origin() + static_cast<Time>(s), out[s + 1]);
    const double m = *std::max_element(v.begin(), v.end());
    for (double& x : v) x -= m;
    out[s] = std::move(v);
  }
  return out;
}

// eta for buffer positions 0..length.
template <FiniteFeynmanKacModel Model>
std::vector<std::vector<double>> forward_eta(const Model& model,
                                             const WindowOf<Model>& w,
                                             std::vector<double> init) {
  const auto len = static_cast<std::size_t>(w.length());
  std::vector<std::vector<double>> out;
  out.reserve(len + 1);
  FiniteLaw mu(std::move(init));
  out.push_back(mu.probabilities());
  for (std::size_t s = 0; s < len; ++s) {
    mu = phi_map(model, w, w.origin() + static_cast<Time>(s), mu).law;
    out.push_back(mu.probabilities());
  }
  return out;
}

namespace detail {

inline double log_ratio_oscillation(const std::vector<double>& a,
                                    const std::vector<double>& b) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return hi - lo;
}

template <FiniteFeynmanKacModel Model>
bool transitions_strictly_positive(const Model& model, const WindowOf<Model>& w,
                                   Time first, Time last) {
  for (Time t = first; t <= last; ++t)
    for (std::size_t x = 0; x < model.num_states(); ++x)
      for (double v : model.transition_row(w, t, x))
        if (!(v > 0.0)) return false;
  return true;
}

}  // namespace detail

template <FiniteFeynmanKacModel Model>
EigenTriple finite_h(const Model& model, const WindowOf<Model>& w, Time first,
                     Time last, double tol = 1e-9) {
  if (first > last) throw std::invalid_argument("finite_h: empty evaluation range");
  w.require(first, last + 1);
  const std::size_t k = model.num_states();

  std::vector<double> term_b(k);
  for (std::size_t x = 0; x < k; ++x) term_b[x] = 3.0 * static_cast<double>(x);
  const auto log_u = backward_log_u(model, w, std::vector<double>(k, 0.0));
  const auto log_u_b = backward_log_u(model, w, term_b);

  std::vector<double> init_b(k, 1e-3 / static_cast<double>(k));
  init_b[k - 1] += 1.0 - 1e-3;
  const auto eta_a = forward_eta(model, w, model.initial_law(w));
  const auto eta_b = forward_eta(model, w, init_b);

  EigenTriple out;
  out.first = first;
  out.last = last;
  const auto pos = [&](Time t) { return static_cast<std::size_t>(w.raw_index(t)); };
  for (Time t = first; t <= last; ++t) {
    const std::size_t s = pos(t);
    out.h_gap = std::max(out.h_gap, detail::log_ratio_oscillation(log_u[s], log_u_b[s]));
    std::vector<double> la(k), lb(k);
    for (std::size_t x = 0; x < k; ++x) {
      la[x] = std::log(eta_a[s][x]);
      lb[x] = std::log(eta_b[s][x]);
    }
    out.eta_gap = std::max(out.eta_gap, detail::log_ratio_oscillation(la, lb));
  }
  if (!(out.h_gap <= tol) || !(out.eta_gap <= tol)) {
    std::ostringstream msg;
    msg << "finite_h: not converged within the window (h gap " << out.h_gap
        << ", eta gap " << out.eta_gap << ", tol " << tol
        << "); use a longer window around [" << first << ", " << last << "]";
    if (!detail::transitions_strictly_positive(model, w, w.origin(), w.end() - 1))
      msg << "; transition matrix has zero entries, so geometric forgetting is "
             "not guaranteed";
    throw EigenConvergenceError(msg.str());
  }

  double sum_log_lambda = 0.0;
  for (Time t = first; t <= last; ++t) {
    const std::size_t s = pos(t);
    const std::vector<double>& eta = eta_a[s];
    const std::vector<double> logg = model.log_potential_vector(w, t);
    std::vector<double> h(k);
    double eh = 0.0, lam = 0.0;
    for (std::size_t x = 0; x < k; ++x) {
      h[x] = std::exp(log_u[s][x]);
      eh += eta[x] * h[x];
      lam += eta[x] * std::exp(logg[x]);
    }
    for (double& v : h) v /= eh;
    out.h.push_back(std::move(h));
    out.eta.push_back(eta);
    out.lambda.push_back(lam);
    out.log_lambda.push_back(std::log(lam));
    sum_log_lambda += std::log(lam);
  }
  out.Lambda_hat = sum_log_lambda / static_cast<double>(last - first + 1);
  return out;
}

// psi = h on the whole window, from the terminal-1 backward recursion. The
// eigen relation Q_t(psi_{t+1}) ~ psi_t holds exactly at every position, and
// psi agrees with finite_h's h up to a per-time constant.
template <FiniteFeynmanKacModel Model>
TabulatedTwist<Model> exact_h_twist(const Model& model, const WindowOf<Model>& w) {
  auto table = backward_log_u(model, w, std::vector<double>(model.num_states(), 0.0));
  return TabulatedTwist<Model>(model, w, std::move(table), 0);
}

}  // namespace tpf
