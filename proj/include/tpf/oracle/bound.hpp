#pragma once

// Upper bound log(1 + D / (N - 1)) on the variance growth rate, with
//   D = max over window positions of C_t * osc_t(h / psi),
//   C_t = (2 max psi / min psi - 1) * max(psi / h).
// The essential supremum over paths becomes a max over evaluation times.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "tpf/twist/eigen.hpp"

namespace tpf {

struct BoundReport {
  double D = 0.0;
  double max_C = 0.0;
  double max_osc = 0.0;
  Time argmax = 0;
  double bound(std::size_t N) const {
    if (N < 2) throw std::invalid_argument("upsilon bound needs N >= 2");
    return std::log1p(D / static_cast<double>(N - 1));
  }
};

inline double bound_term(const std::vector<double>& psi, const std::vector<double>& h,
                         double* c_out = nullptr, double* osc_out = nullptr) {
  double pmax = 0.0, pmin = std::numeric_limits<double>::infinity();
  double ph_max = 0.0;
  double hp_max = -std::numeric_limits<double>::infinity();
  double hp_min = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < psi.size(); ++x) {
    pmax = std::max(pmax, psi[x]);
    pmin = std::min(pmin, psi[x]);
    ph_max = std::max(ph_max, psi[x] / h[x]);
    hp_max = std::max(hp_max, h[x] / psi[x]);
    hp_min = std::min(hp_min, h[x] / psi[x]);
  }
  const double c = (2.0 * pmax / pmin - 1.0) * ph_max;
  const double osc = hp_max - hp_min;
  if (c_out) *c_out = c;
  if (osc_out) *osc_out = osc;
  return c * osc;
}

// psi_at(t) returns psi_t as linear values on X.
inline BoundReport upsilon_bound(const EigenTriple& triple,
                                 const std::function<std::vector<double>(Time)>& psi_at) {
  BoundReport rep;
  for (Time t = triple.first; t <= triple.last; ++t) {
    double c = 0.0, osc = 0.0;
    const double d = bound_term(psi_at(t), triple.h_at(t), &c, &osc);
    rep.max_C = std::max(rep.max_C, c);
    rep.max_osc = std::max(rep.max_osc, osc);
    if (d > rep.D) {
      rep.D = d;
      rep.argmax = t;
    }
  }
  return rep;
}

template <class Twist, class Window>
BoundReport upsilon_bound(const EigenTriple& triple, const Twist& twist, const Window& w,
                          std::size_t k) {
  return upsilon_bound(triple, [&](Time t) {
    std::vector<double> lp(k), p(k);
    for (std::size_t x = 0; x < k; ++x) lp[x] = twist.log_psi(w, t, x);
    const double m = *std::max_element(lp.begin(), lp.end());
    for (std::size_t x = 0; x < k; ++x) p[x] = std::exp(lp[x] - m);
    return p;
  });
}

}  // namespace tpf
