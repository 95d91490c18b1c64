#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tpf {

using Time = std::int64_t;

// Raised when an operation needs an observation outside the window. The
// message names the missing index and the window length that would cover it.
class WindowError : public std::out_of_range {
 public:
  WindowError(Time required_index, Time first, Time end)
      : std::out_of_range(
            "window too short: observation index " +
            std::to_string(required_index) + " required but window covers [" +
            std::to_string(first) + ", " + std::to_string(end) +
            "); required window length " +
            std::to_string(required_index - first + 1)),
        required_index_(required_index) {}

  Time required_index() const noexcept { return required_index_; }

 private:
  Time required_index_;
};

// A finite slice of an observation path. at(k) is Y_k for
// origin <= k < origin + length. shift(a) realizes the shift operator
// applied a times: shift(a).at(k) == at(k + a). Shifted windows share the
// underlying buffer, so shifting is O(1).
template <class Obs>
class ObservationWindow {
 public:
  using Observation = Obs;

  ObservationWindow() : data_(std::make_shared<const std::vector<Obs>>()) {}

  explicit ObservationWindow(std::vector<Obs> values, Time origin = 0)
      : data_(std::make_shared<const std::vector<Obs>>(std::move(values))),
        origin_(origin) {}

  Time origin() const noexcept { return origin_; }
  Time length() const noexcept { return static_cast<Time>(data_->size()); }
  // Exclusive end of the covered index range.
  Time end() const noexcept { return origin_ + length(); }

  bool covers(Time k) const noexcept { return k >= origin_ && k < end(); }

  const Obs& at(Time k) const {
    if (!covers(k)) throw WindowError(k, origin_, end());
    return (*data_)[static_cast<std::size_t>(k - origin_)];
  }

  // Throws WindowError unless [first, last_exclusive) is covered.
  void require(Time first, Time last_exclusive) const {
    if (last_exclusive <= first) return;
    if (!covers(first)) throw WindowError(first, origin_, end());
    if (!covers(last_exclusive - 1))
      throw WindowError(last_exclusive - 1, origin_, end());
  }

  ObservationWindow shift(Time a) const {
    ObservationWindow w = *this;
    w.origin_ = origin_ - a;
    return w;
  }

  // Position of index k in the shared buffer. Stable under shift, so tables
  // precomputed for one window can be looked up from any of its shifts.
  Time raw_index(Time k) const noexcept { return k - origin_; }

  bool same_path(const ObservationWindow& other) const noexcept {
    return data_ == other.data_;
  }

  const std::vector<Obs>& values() const noexcept { return *data_; }

  friend bool operator==(const ObservationWindow& a,
                         const ObservationWindow& b) {
    return a.origin_ == b.origin_ && *a.data_ == *b.data_;
  }

 private:
  std::shared_ptr<const std::vector<Obs>> data_;
  Time origin_ = 0;
};

}  // namespace tpf
