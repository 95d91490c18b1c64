#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tpf {

// Enumeration of X^N for X = {0..k-1}: index = sum_i x^i k^i.
class ProductSpace {
 public:
  ProductSpace(std::size_t k, std::size_t N, std::size_t guard) : k_(k), N_(N) {
    if (k == 0 || N == 0) throw std::invalid_argument("ProductSpace: k and N must be >= 1");
    double sz = std::pow(static_cast<double>(k), static_cast<double>(N));
    if (sz > static_cast<double>(guard))
      throw std::length_error("product space k^N = " + std::to_string(sz) +
                              " exceeds the size guard " + std::to_string(guard));
    size_ = 1;
    for (std::size_t i = 0; i < N; ++i) size_ *= k;
    digits_.resize(size_ * N);
    for (std::size_t x = 0; x < size_; ++x) {
      std::size_t r = x;
      for (std::size_t i = 0; i < N; ++i) {
        digits_[x * N + i] = r % k;
        r /= k;
      }
    }
  }

  std::size_t k() const noexcept { return k_; }
  std::size_t N() const noexcept { return N_; }
  std::size_t size() const noexcept { return size_; }
  std::size_t digit(std::size_t x, std::size_t i) const { return digits_[x * N_ + i]; }
  const std::size_t* digits(std::size_t x) const { return &digits_[x * N_]; }

  std::size_t index(const std::vector<std::size_t>& xs) const {
    std::size_t idx = 0, mul = 1;
    for (std::size_t i = 0; i < N_; ++i) {
      idx += xs[i] * mul;
      mul *= k_;
    }
    return idx;
  }

 private:
  std::size_t k_, N_, size_ = 1;
  std::vector<std::size_t> digits_;
};

inline constexpr std::size_t kStreamingGuard = 10000;  // exact_moments
inline constexpr std::size_t kDenseGuard = 2048;       // materialized kernels

}  // namespace tpf
