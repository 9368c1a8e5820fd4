#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "resume_snn/errors.hpp"

namespace resume_snn {

/// Simulation time in whole steps (1 step = 1 ms at the default resolution).
using Time = int;

/// Strictly increasing list of spike times.
class SpikeTrain {
 public:
  SpikeTrain() = default;
  SpikeTrain(std::initializer_list<Time> times) : SpikeTrain(std::vector<Time>(times)) {}
  explicit SpikeTrain(std::vector<Time> times) : times_(std::move(times)) {
    if (std::adjacent_find(times_.begin(), times_.end(), [](Time a, Time b) { return a >= b; }) != times_.end()) {
      throw ContractError("spike times must be strictly increasing");
    }
  }

  /// Appends a spike; `t` must be later than the last spike.
  void push_back(Time t) {
    if (!times_.empty() && t <= times_.back()) {
      throw ContractError("spike appended out of order at t=" + std::to_string(t));
    }
    times_.push_back(t);
  }

  [[nodiscard]] std::span<const Time> times() const { return times_; }
  [[nodiscard]] std::size_t size() const { return times_.size(); }
  [[nodiscard]] bool empty() const { return times_.empty(); }
  [[nodiscard]] Time front() const { return times_.front(); }
  [[nodiscard]] Time back() const { return times_.back(); }
  [[nodiscard]] auto begin() const { return times_.begin(); }
  [[nodiscard]] auto end() const { return times_.end(); }
  void clear() { times_.clear(); }

  friend bool operator==(const SpikeTrain&, const SpikeTrain&) = default;

 private:
  std::vector<Time> times_;
};

/// Union of two disjoint trains, in order.
inline SpikeTrain merge(const SpikeTrain& a, const SpikeTrain& b) {
  std::vector<Time> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return SpikeTrain(std::move(out));
}

/// Smallest gap between consecutive spikes, or `fallback` with fewer than two spikes.
inline Time min_isi(const SpikeTrain& s, Time fallback) {
  Time best = fallback;
  for (std::size_t i = 1; i < s.size(); ++i) best = std::min(best, s.times()[i] - s.times()[i - 1]);
  return best;
}

}  // namespace resume_snn
