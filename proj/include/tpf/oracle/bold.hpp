#pragma once

// Dense particle-system kernels on X^N at one time step t.

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <vector>

#include "tpf/fk.hpp"
#include "tpf/oracle/moments.hpp"
#include "tpf/oracle/product.hpp"
#include "tpf/twist/eigen.hpp"
#include "tpf/twist/twist.hpp"

namespace tpf {

struct BoldKernelSet {
  std::size_t k = 0, N = 0;
  Time t = 0;
  Eigen::MatrixXd M_bold;       // standard resample-mutate kernel
  Eigen::MatrixXd M_tilde;      // M_bold(x, x') psi_bold(x') / M_bold(psi_bold)(x)
  Eigen::MatrixXd M_tilde_mix;  // the sampler's mixture description
  Eigen::MatrixXd Q_bold;       // G_bold(x) M_bold(x, x')
  Eigen::MatrixXd phi;          // M_bold(psi_bold)(x) / psi_bold(x')
  Eigen::MatrixXd R_tilde;      // increment^2 * M_tilde_mix, increment from the sampler
  Eigen::VectorXd G_bold;       // mean of G_t
  Eigen::VectorXd psi_bold;     // mean of psi_{t+1}
  std::optional<Eigen::VectorXd> h_bold;  // mean of h_t when an EigenTriple is given
};

template <FiniteFeynmanKacModel Model, class Twist>
  requires FiniteTwistFor<Twist, Model>
BoldKernelSet build_bold_kernels(const Model& model, const Twist& twist, std::size_t N,
                                 const WindowOf<Model>& w, Time t,
                                 const EigenTriple* triple = nullptr) {
  const std::size_t k = model.num_states();
  const ProductSpace ps(k, N, kDenseGuard);
  const std::size_t S = ps.size();
  w.require(t, t + std::max<Time>(twist.lookahead(), model.window_span() - 1) + 1);
  BoldKernelSet out;
  out.k = k;
  out.N = N;
  out.t = t;
  const auto logg = model.log_potential_vector(w, t);
  std::vector<double> g(k), psi(k);
  for (std::size_t x = 0; x < k; ++x) {
    g[x] = std::exp(logg[x]);
    psi[x] = std::exp(twist.log_psi(w, t + 1, x));
  }
  const auto st = detail::step_tables(model, twist, w, t);

  out.G_bold.resize(static_cast<Eigen::Index>(S));
  out.psi_bold.resize(static_cast<Eigen::Index>(S));
  for (std::size_t x = 0; x < S; ++x) {
    double gs = 0.0, ps_ = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      gs += g[ps.digit(x, i)];
      ps_ += psi[ps.digit(x, i)];
    }
    out.G_bold[static_cast<Eigen::Index>(x)] = gs / static_cast<double>(N);
    out.psi_bold[static_cast<Eigen::Index>(x)] = ps_ / static_cast<double>(N);
  }
  if (triple) {
    Eigen::VectorXd hb(static_cast<Eigen::Index>(S));
    const auto& h = triple->h_at(t);
    for (std::size_t x = 0; x < S; ++x) {
      double s = 0.0;
      for (std::size_t i = 0; i < N; ++i) s += h[ps.digit(x, i)];
      hb[static_cast<Eigen::Index>(x)] = s / static_cast<double>(N);
    }
    out.h_bold = std::move(hb);
  }

  const auto Si = static_cast<Eigen::Index>(S);
  out.M_bold.resize(Si, Si);
  out.M_tilde.resize(Si, Si);
  out.M_tilde_mix.resize(Si, Si);
  out.Q_bold.resize(Si, Si);
  out.phi.resize(Si, Si);
  out.R_tilde.resize(Si, Si);
  std::vector<double> scratch;
  for (std::size_t x = 0; x < S; ++x) {
    const auto xi = static_cast<Eigen::Index>(x);
    // m_x = sum_j G(x^j) M(x^j, .) / sum_j G(x^j), directly from the model
    std::vector<double> m(k, 0.0);
    double gs = 0.0;
    for (std::size_t j = 0; j < N; ++j) gs += g[ps.digit(x, j)];
    for (std::size_t j = 0; j < N; ++j) {
      const auto row = model.transition_row(w, t, ps.digit(x, j));
      for (std::size_t z = 0; z < k; ++z) m[z] += g[ps.digit(x, j)] / gs * row[z];
    }
    double norm = 0.0;
    for (std::size_t xp = 0; xp < S; ++xp) {
      double prod = 1.0;
      for (std::size_t i = 0; i < N; ++i) prod *= m[ps.digit(xp, i)];
      out.M_bold(xi, static_cast<Eigen::Index>(xp)) = prod;
      norm += prod * out.psi_bold[static_cast<Eigen::Index>(xp)];
    }
    const auto pl = detail::parent_laws(st, ps, x);
    for (std::size_t xp = 0; xp < S; ++xp) {
      const auto xpi = static_cast<Eigen::Index>(xp);
      const double mb = out.M_bold(xi, xpi);
      out.M_tilde(xi, xpi) = mb * out.psi_bold[xpi] / norm;
      out.Q_bold(xi, xpi) = out.G_bold[xi] * mb;
      out.phi(xi, xpi) = norm / out.psi_bold[xpi];
      const double mix = detail::mixture_entry(pl, ps, xp, scratch);
      out.M_tilde_mix(xi, xpi) = mix;
      const double inc = std::exp(pl.lse_q - detail::lse_psi_at(st, ps, xp));
      out.R_tilde(xi, xpi) = inc * inc * mix;
    }
  }
  return out;
}

}  // namespace tpf
