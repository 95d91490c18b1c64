#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "tpf/core/log_math.hpp"
#include "tpf/core/rng.hpp"

namespace tpf {

// Walker/Vose alias table built from log weights. One uniform per draw.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> log_weights) {
    const std::size_t n = log_weights.size();
    if (n == 0) throw std::invalid_argument("AliasTable: no weights");
    const double lse = log_sum_exp(log_weights);
    if (!std::isfinite(lse))
      throw std::invalid_argument(
          "multinomial_resample: all log weights are -inf (or some are +inf/NaN)");
    prob_.resize(n);
    alias_.resize(n);
    std::vector<double> scaled(n);
    std::vector<std::size_t> small, large;
    small.reserve(n);
    large.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double p = std::exp(log_weights[i] - lse);
      if (std::isnan(p))
        throw std::invalid_argument("multinomial_resample: NaN log weight");
      scaled[i] = p * static_cast<double>(n);
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      const std::size_t s = small.back();
      small.pop_back();
      const std::size_t l = large.back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (std::size_t i : large) {
      prob_[i] = 1.0;
      alias_[i] = i;
    }
    for (std::size_t i : small) {  // rounding leftovers, mass ~1
      prob_[i] = 1.0;
      alias_[i] = i;
    }
  }

  std::size_t size() const noexcept { return prob_.size(); }

  std::size_t sample(double u) const noexcept {
    const double x = u * static_cast<double>(prob_.size());
    auto i = static_cast<std::size_t>(x);
    if (i >= prob_.size()) i = prob_.size() - 1;
    const double frac = x - static_cast<double>(i);
    return frac < prob_[i] ? i : alias_[i];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

// count i.i.d. draws from the categorical law proportional to exp(log_weights).
inline std::vector<std::size_t> multinomial_resample(std::span<const double> log_weights,
                                                     std::size_t count, RngStream& rng) {
  const AliasTable table(log_weights);
  std::vector<std::size_t> out(count);
  for (auto& a : out) a = table.sample(rng.uniform());
  return out;
}

}  // namespace tpf
