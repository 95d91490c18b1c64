#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "tpf/core/log_math.hpp"

namespace tpf::harness {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  double sd = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("mean_se: empty sample");
  MeanSe out;
  const double n = static_cast<double>(v.size());
  for (double x : v) out.mean += x;
  out.mean /= n;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / (n - 1.0));
    out.se = out.sd / std::sqrt(n);
  }
  return out;
}

// Relative second moment from log ratios l_r = log(Z_r / Z_ref):
// log V = log mean exp(2 l), with delta-method s.e. sd(W) / (sqrt(R) mean(W))
// for W = exp(2 l).
struct LogMoment {
  double log_v = 0.0;
  double se_log_v = 0.0;
};

inline LogMoment log_relative_second_moment(const std::vector<double>& log_ratio) {
  std::vector<double> two(log_ratio.size());
  for (std::size_t i = 0; i < two.size(); ++i) two[i] = 2.0 * log_ratio[i];
  LogMoment out;
  const double lse = log_sum_exp(two);
  out.log_v = lse - std::log(static_cast<double>(two.size()));
  std::vector<double> w(two.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(two[i] - out.log_v);
  out.se_log_v = mean_se(w).se;  // mean(w) == 1 by construction
  return out;
}

// Delete-a-group jackknife standard error of a statistic of a sample indexed
// 0..R-1; groups are contiguous blocks of replicate indices.
inline double grouped_jackknife_se(
    std::size_t R, std::size_t groups,
    const std::function<double(const std::vector<std::size_t>&)>& stat) {
  if (groups < 2 || groups > R) throw std::invalid_argument("jackknife: need 2 <= groups <= R");
  std::vector<double> theta(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t lo = g * R / groups, hi = (g + 1) * R / groups;
    std::vector<std::size_t> keep;
    keep.reserve(R - (hi - lo));
    for (std::size_t r = 0; r < R; ++r)
      if (r < lo || r >= hi) keep.push_back(r);
    theta[g] = stat(keep);
  }
  double m = 0.0;
  for (double t : theta) m += t;
  m /= static_cast<double>(groups);
  double ss = 0.0;
  for (double t : theta) ss += (t - m) * (t - m);
  const double G = static_cast<double>(groups);
  return std::sqrt((G - 1.0) / G * ss);
}

// Pooled standard error of a difference of two independent estimates.
inline double pooled_se(double a, double b) { return std::sqrt(a * a + b * b); }

}  // namespace tpf::harness
