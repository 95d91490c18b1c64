#pragma once

// Counter-based random streams.
//
// Every draw made by the library comes from an RngStream whose output is a
// pure function of (root seed, replicate, step, particle, purpose) and of the
// number of values already taken from that stream. There is no generator
// state shared between replicates, so replicates can run in any order or in
// parallel and still produce bitwise-identical results.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace tpf {

enum class Purpose : std::uint64_t {
  kInitial = 1,
  kResample = 2,
  kMutate = 3,
  kTwistSelect = 4,
  kTwistMutate = 5,
  kSimulate = 6,
  kWindow = 7,
  kTest = 8,
};

struct StreamCoord {
  std::uint64_t replicate = 0;
  std::uint64_t step = 0;
  std::uint64_t particle = 0;
  Purpose purpose = Purpose::kTest;
};

namespace detail {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t combine(std::uint64_t key, std::uint64_t v) noexcept {
  return mix64(key ^ mix64(v + kGolden));
}

}  // namespace detail

// SplitMix64 keyed by the stream coordinates. Satisfies
// UniformRandomBitGenerator so it can drive <random> distributions.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t root_seed, const StreamCoord& c) noexcept
      : key_(derive_key(root_seed, c)) {}

  static constexpr std::uint64_t derive_key(std::uint64_t root_seed,
                                            const StreamCoord& c) noexcept {
    std::uint64_t k = detail::mix64(root_seed ^ 0x5851f42d4c957f2dULL);
    k = detail::combine(k, c.replicate);
    k = detail::combine(k, c.step);
    k = detail::combine(k, c.particle);
    k = detail::combine(k, static_cast<std::uint64_t>(c.purpose));
    return k;
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    ++counter_;
    return detail::mix64(key_ + counter_ * detail::kGolden);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1).
  double uniform_open() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    std::normal_distribution<double> d;
    return d(*this);
  }

  // Uniform integer on {0, ..., n-1}, n >= 1.
  std::size_t below(std::size_t n) noexcept {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

  std::uint64_t draws() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace tpf
