#pragma once

// Exact first and second moments of the twisted estimator on a finite model,
// by summing over X^N. The particle kernel used here is the one the sampler
// implements (standard draws for N-1 coordinates, one coordinate from the
// twisted mixture), and the estimator increments are the sampler's own, so a
// wrong index convention in either shows up as bias.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "tpf/core/log_math.hpp"
#include "tpf/fk.hpp"
#include "tpf/oracle/product.hpp"
#include "tpf/twist/twist.hpp"

namespace tpf {

struct MomentsReport {
  std::size_t N = 0;
  std::vector<double> log_Z;       // exact, n = 0..n_max
  std::vector<double> log_first;   // log E[Z~_n]
  std::vector<double> log_second;  // log E[Z~_n^2]
  std::vector<double> V_tilde;     // E[Z~_n^2] / Z_n^2
  std::vector<double> log_V_over_n;
};

namespace detail {

// Per-step single-particle ingredients at time t.
struct StepTables {
  std::vector<double> g;                 // G_t / max
  std::vector<double> lq;                // log Q_t(psi_{t+1})
  std::vector<double> lpsi_next;         // log psi_{t+1}
  std::vector<std::vector<double>> m;    // M_t rows
  std::vector<std::vector<double>> tw;   // twisted rows
};

template <FiniteFeynmanKacModel Model, class Twist>
StepTables step_tables(const Model& model, const Twist& twist,
                       const WindowOf<Model>& w, Time t) {
  const std::size_t k = model.num_states();
  StepTables st;
  const auto logg = model.log_potential_vector(w, t);
  const double gm = *std::max_element(logg.begin(), logg.end());
  st.g.resize(k);
  st.lq.resize(k);
  st.lpsi_next.resize(k);
  for (std::size_t x = 0; x < k; ++x) {
    st.g[x] = std::exp(logg[x] - gm);
    st.lq[x] = twist.log_q_psi(w, t, x);
    st.lpsi_next[x] = twist.log_psi(w, t + 1, x);
    st.m.push_back(model.transition_row(w, t, x));
    st.tw.push_back(twist.twisted_row(w, t, x));
  }
  return st;
}

// Mixture laws of one particle x: m_x (standard resample-mutate) and t_x
// (twisted coordinate), plus log sum_j Q(psi)(x^j).
struct ParentLaws {
  std::vector<double> m;
  std::vector<double> t;
  double lse_q = 0.0;
};

inline ParentLaws parent_laws(const StepTables& st, const ProductSpace& ps, std::size_t x) {
  const std::size_t k = ps.k(), N = ps.N();
  const std::size_t* d = ps.digits(x);
  ParentLaws out;
  out.m.assign(k, 0.0);
  out.t.assign(k, 0.0);
  double gs = 0.0;
  for (std::size_t j = 0; j < N; ++j) gs += st.g[d[j]];
  std::vector<double> lq(N);
  for (std::size_t j = 0; j < N; ++j) lq[j] = st.lq[d[j]];
  out.lse_q = log_sum_exp(lq);
  for (std::size_t j = 0; j < N; ++j) {
    const double wg = st.g[d[j]] / gs;
    const double wq = std::exp(lq[j] - out.lse_q);
    for (std::size_t z = 0; z < k; ++z) {
      out.m[z] += wg * st.m[d[j]][z];
      out.t[z] += wq * st.tw[d[j]][z];
    }
  }
  return out;
}

// (1/N) sum_K t(x'^K) prod_{i != K} m(x'^i)
inline double mixture_entry(const ParentLaws& pl, const ProductSpace& ps, std::size_t xp,
                            std::vector<double>& prefix) {
  const std::size_t N = ps.N();
  const std::size_t* d = ps.digits(xp);
  double total = 0.0;
  prefix.resize(N + 1);
  prefix[0] = 1.0;
  for (std::size_t i = 0; i < N; ++i) prefix[i + 1] = prefix[i] * pl.m[d[i]];
  double suffix = 1.0;
  for (std::size_t K = N; K-- > 0;) {
    total += prefix[K] * pl.t[d[K]] * suffix;
    suffix *= pl.m[d[K]];
  }
  return total / static_cast<double>(N);
}

inline double lse_psi_at(const StepTables& st, const ProductSpace& ps, std::size_t xp) {
  const std::size_t* d = ps.digits(xp);
  std::vector<double> v(ps.N());
  for (std::size_t i = 0; i < ps.N(); ++i) v[i] = st.lpsi_next[d[i]];
  return log_sum_exp(v);
}

}  // namespace detail

// mu0 defaults to the model's initial law.
template <FiniteFeynmanKacModel Model, class Twist>
  requires FiniteTwistFor<Twist, Model>
MomentsReport exact_moments(const Model& model, const Twist& twist, std::size_t N,
                            const WindowOf<Model>& w, Time n,
                            std::optional<std::vector<double>> mu0 = std::nullopt) {
  const std::size_t k = model.num_states();
  const ProductSpace ps(k, N, kStreamingGuard);
  w.require(0, n + std::max<Time>(twist.lookahead(), model.window_span() - 1));
  const std::vector<double> init = mu0 ? *mu0 : model.initial_law(w);
  FiniteLaw::validate(init, "exact_moments: mu0");

  MomentsReport rep;
  rep.N = N;
  {
    auto fw = forward_pass(model, w, n, FiniteLaw(init));
    rep.log_Z = fw.log_Z;
  }
  const std::size_t S = ps.size();
  std::vector<double> a1(S), a2(S);
  for (std::size_t x = 0; x < S; ++x) {
    double p = 1.0;
    for (std::size_t i = 0; i < N; ++i) p *= init[ps.digit(x, i)];
    a1[x] = p;
    a2[x] = p;
  }
  double l1 = 0.0, l2 = 0.0;
  rep.log_first.push_back(0.0);
  rep.log_second.push_back(0.0);

  std::vector<double> b1(S), b2(S), cq(S), lpsi(S);
  for (Time t = 0; t < n; ++t) {
    const auto st = detail::step_tables(model, twist, w, t);
    std::vector<detail::ParentLaws> laws;
    laws.reserve(S);
    double qmax = kNegInf;
    for (std::size_t x = 0; x < S; ++x) {
      laws.push_back(detail::parent_laws(st, ps, x));
      qmax = std::max(qmax, laws.back().lse_q);
    }
    double pmin = std::numeric_limits<double>::infinity();
    for (std::size_t xp = 0; xp < S; ++xp) {
      lpsi[xp] = detail::lse_psi_at(st, ps, xp);
      pmin = std::min(pmin, lpsi[xp]);
    }
    for (std::size_t x = 0; x < S; ++x) cq[x] = std::exp(laws[x].lse_q - qmax);
    std::fill(b1.begin(), b1.end(), 0.0);
    std::fill(b2.begin(), b2.end(), 0.0);
    std::vector<double> scratch;
    for (std::size_t x = 0; x < S; ++x) {
      if (a1[x] == 0.0 && a2[x] == 0.0) continue;
      const double c1 = a1[x] * cq[x];
      const double c2 = a2[x] * cq[x] * cq[x];
      for (std::size_t xp = 0; xp < S; ++xp) {
        const double mt = detail::mixture_entry(laws[x], ps, xp, scratch);
        b1[xp] += c1 * mt;
        b2[xp] += c2 * mt;
      }
    }
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t xp = 0; xp < S; ++xp) {
      const double cp = std::exp(pmin - lpsi[xp]);
      b1[xp] *= cp;
      b2[xp] *= cp * cp;
      s1 += b1[xp];
      s2 += b2[xp];
    }
    l1 += qmax - pmin + std::log(s1);
    l2 += 2.0 * (qmax - pmin) + std::log(s2);
    for (std::size_t xp = 0; xp < S; ++xp) {
      a1[xp] = b1[xp] / s1;
      a2[xp] = b2[xp] / s2;
    }
    rep.log_first.push_back(l1);
    rep.log_second.push_back(l2);
  }
  for (std::size_t i = 0; i < rep.log_Z.size(); ++i) {
    const double lv = rep.log_second[i] - 2.0 * rep.log_Z[i];
    rep.V_tilde.push_back(std::exp(lv));
    rep.log_V_over_n.push_back(i == 0 ? 0.0 : lv / static_cast<double>(i));
  }
  return rep;
}

}  // namespace tpf
