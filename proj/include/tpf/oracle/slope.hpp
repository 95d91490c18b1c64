#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tpf/oracle/moments.hpp"

namespace tpf {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double max_abs_residual = 0.0;
  double residual_sd = 0.0;
  Time n_first = 0, n_last = 0;
  std::size_t points = 0;
};

// Ordinary least squares of y on x.
inline SlopeFit ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  if (m < 3 || y.size() != m) throw std::invalid_argument("ols_fit: need >= 3 paired points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  SlopeFit f;
  f.points = m;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    rss += r * r;
    f.max_abs_residual = std::max(f.max_abs_residual, std::abs(r));
  }
  f.residual_sd = std::sqrt(rss / static_cast<double>(m - 2));
  f.slope_stderr = f.residual_sd / std::sqrt(sxx);
  return f;
}

// Slope of log V_n against n over the last two thirds of [n_first, n_last].
inline SlopeFit fit_log_v_slope(const std::vector<double>& V, Time n_first, Time n_last) {
  if (n_last - n_first + 1 < 10)
    throw std::invalid_argument("upsilon_slope: n range needs at least 10 points");
  if (n_last >= static_cast<Time>(V.size()))
    throw std::invalid_argument("upsilon_slope: n range exceeds computed moments");
  const Time start = n_last - (2 * (n_last - n_first + 1)) / 3 + 1;
  std::vector<double> xs, ys;
  for (Time n = start; n <= n_last; ++n) {
    xs.push_back(static_cast<double>(n));
    ys.push_back(std::log(V[static_cast<std::size_t>(n)]));
  }
  auto f = ols_fit(xs, ys);
  f.n_first = start;
  f.n_last = n_last;
  return f;
}

template <FiniteFeynmanKacModel Model, class Twist>
  requires FiniteTwistFor<Twist, Model>
SlopeFit upsilon_slope(const Model& model, const Twist& twist, std::size_t N,
                       const WindowOf<Model>& w, Time n_first, Time n_last,
                       std::optional<std::vector<double>> mu0 = std::nullopt) {
  if (n_last - n_first + 1 < 10)
    throw std::invalid_argument("upsilon_slope: n range needs at least 10 points");
  const auto rep = exact_moments(model, twist, N, w, n_last, std::move(mu0));
  return fit_log_v_slope(rep.V_tilde, n_first, n_last);
}

}  // namespace tpf
