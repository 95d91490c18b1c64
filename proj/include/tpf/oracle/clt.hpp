#pragma once

// Asymptotic variances of the particle approximations at time n:
//   sigma2   for sqrt(N) (eta_n^N(phi) - eta_n(phi)), the same for every psi,
//   varsigma2 for sqrt(N) (gamma_n^N(phi) - gamma_n(phi)), which depends on psi
//            through psi_p / eta_p(psi_p) for p >= 1.
// Both use the normalized backward functions
//   B_n = f, B_p = Q_p(B_{p+1}) / eta_p(G_p).

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tpf/fk.hpp"
#include "tpf/twist/twist.hpp"

namespace tpf {

struct CltVariances {
  double sigma2 = 0.0;
  double varsigma2 = 0.0;
  double eta_phi = 0.0;    // eta_n(phi)
  double gamma_phi = 0.0;  // gamma_n(phi)
  double log_Z = 0.0;      // log gamma_n(1)
};

template <FiniteFeynmanKacModel Model, class Twist>
  requires TwistFor<Twist, Model>
CltVariances exact_clt_variances(const Model& model, const Twist& twist,
                                 const std::vector<double>& phi, const WindowOf<Model>& w,
                                 Time n) {
  const std::size_t k = model.num_states();
  if (phi.size() != k) throw std::invalid_argument("exact_clt_variances: phi size != k");
  if (n < 0) throw std::invalid_argument("exact_clt_variances: n must be >= 0");
  w.require(0, n + std::max<Time>(twist.lookahead(), model.window_span() - 1));
  const auto fw = forward_pass(model, w, n, FiniteLaw(model.initial_law(w)));
  const auto N1 = static_cast<std::size_t>(n) + 1;

  std::vector<double> eg(N1, 0.0);  // eta_p(G_p)
  for (Time p = 0; p < n; ++p) {
    const auto logg = model.log_potential_vector(w, p);
    double s = 0.0;
    for (std::size_t x = 0; x < k; ++x) s += fw.laws[static_cast<std::size_t>(p)][x] * std::exp(logg[x]);
    eg[static_cast<std::size_t>(p)] = s;
  }
  const auto& eta_n = fw.laws.back();
  CltVariances out;
  out.eta_phi = eta_n.expect(phi);
  out.log_Z = fw.log_Z.back();
  out.gamma_phi = out.eta_phi * std::exp(out.log_Z);

  std::vector<double> b = phi;
  std::vector<double> c(k);
  for (std::size_t x = 0; x < k; ++x) c[x] = phi[x] - out.eta_phi;
  double vs = 0.0, sg = 0.0;
  for (Time p = n; p >= 0; --p) {
    const auto& eta = fw.laws[static_cast<std::size_t>(p)];
    if (p < n) {
      b = q_apply(model, w, p, b);
      c = q_apply(model, w, p, c);
      for (std::size_t x = 0; x < k; ++x) {
        b[x] /= eg[static_cast<std::size_t>(p)];
        c[x] /= eg[static_cast<std::size_t>(p)];
      }
    }
    std::vector<double> ratio(k, 1.0);
    if (p >= 1) {
      double m = kNegInf;
      std::vector<double> lp(k);
      for (std::size_t x = 0; x < k; ++x) {
        lp[x] = twist.log_psi(w, p, x);
        m = std::max(m, lp[x]);
      }
      double e = 0.0;
      for (std::size_t x = 0; x < k; ++x) {
        ratio[x] = std::exp(lp[x] - m);
        e += eta[x] * ratio[x];
      }
      for (double& r : ratio) r /= e;
    }
    const double eb = eta.expect(b);
    double tv = 0.0, ts = 0.0;
    for (std::size_t x = 0; x < k; ++x) {
      const double d = b[x] - ratio[x] * eb;
      tv += eta[x] * d * d;
      ts += eta[x] * c[x] * c[x];
    }
    vs += tv;
    sg += ts;
  }
  out.sigma2 = sg;
  out.varsigma2 = vs * std::exp(2.0 * out.log_Z);
  return out;
}

}  // namespace tpf
