#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace tpf {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

// log(sum_i exp(v_i)); -inf for an empty or all -inf input.
inline double log_sum_exp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  if (m == std::numeric_limits<double>::infinity()) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

inline double log_mean_exp(std::span<const double> v) {
  return log_sum_exp(v) - std::log(static_cast<double>(v.size()));
}

inline double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

inline double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (kLogTwoPi + std::log(var) + d * d / var);
}

// Normalized probabilities from log weights.
inline std::vector<double> softmax(std::span<const double> logw) {
  const double lse = log_sum_exp(logw);
  std::vector<double> p(logw.size());
  for (std::size_t i = 0; i < logw.size(); ++i) p[i] = std::exp(logw[i] - lse);
  return p;
}

// Inverse-CDF draw from a cumulative table whose last entry is the total.
inline std::size_t sample_cumulative(std::span<const double> cumulative,
                                     double u) {
  const double target = u * cumulative.back();
  const auto it =
      std::upper_bound(cumulative.begin(), cumulative.end(), target);
  const auto idx = static_cast<std::size_t>(it - cumulative.begin());
  return std::min(idx, cumulative.size() - 1);
}

inline std::vector<double> cumulative_sum(std::span<const double> p) {
  std::vector<double> c(p.size());
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    s += p[i];
    c[i] = s;
  }
  return c;
}

}  // namespace tpf
