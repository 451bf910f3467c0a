#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace gwi {

class InsufficientDomain : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Continuity { kLeft, kRight };

/// Piecewise-constant function on [0, inf).
///
/// With breakpoints b_0 <= b_1 <= ... <= b_{K-1} and values v_0..v_K, the
/// left-continuous version takes v_0 on [0, b_0], v_i on (b_{i-1}, b_i] and
/// v_K beyond b_{K-1}; the right-continuous version moves each breakpoint to
/// the other interval.
class StepFunction {
public:
  StepFunction(std::vector<double> breakpoints, std::vector<double> values,
               Continuity continuity)
      : breakpoints_(std::move(breakpoints)),
        values_(std::move(values)),
        continuity_(continuity) {
    if (values_.size() != breakpoints_.size() + 1) {
      throw std::invalid_argument("StepFunction needs one more value than breakpoints");
    }
    if (!std::is_sorted(breakpoints_.begin(), breakpoints_.end())) {
      throw std::invalid_argument("StepFunction breakpoints must be non-decreasing");
    }
  }

  [[nodiscard]] double operator()(double x) const {
    auto it = continuity_ == Continuity::kLeft
                  ? std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x)
                  : std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    return values_[static_cast<std::size_t>(it - breakpoints_.begin())];
  }

  [[nodiscard]] const std::vector<double>& breakpoints() const { return breakpoints_; }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }
  [[nodiscard]] Continuity continuity() const { return continuity_; }

private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
  Continuity continuity_;
};

/// Builds a monotone, slowly varying step function L >= 1 with L -> inf and
/// L h -> 0 for a positive function h vanishing at infinity, tabulated on an
/// increasing grid.
///
/// L = 1 on [0, x_0] and L = k+1 on (x_{k-1}, x_k], where
///   x_0 = sup{y : h(y) > 1},
///   x_k = max{(k+1) x_{k-1}, sup{y : h(y) > (k+1)^-2}},
/// with sup taken as the largest grid point exceeding the threshold (0 when
/// none does). The resolution of every x_k is therefore the local grid
/// spacing. Throws InsufficientDomain when a requested level cannot be
/// resolved inside the grid.
[[nodiscard]] inline StepFunction construct_slowly_varying(
    std::span<const double> grid, std::span<const double> h, std::size_t levels,
    Continuity continuity = Continuity::kLeft) {
  if (grid.size() != h.size() || grid.empty()) {
    throw std::invalid_argument("grid and h must be non-empty and of equal length");
  }
  if (levels == 0) throw std::invalid_argument("at least one level is required");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(h[i] > 0.0)) throw std::invalid_argument("h must be strictly positive on the grid");
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("grid must be strictly increasing");
    }
  }
  if (grid.front() < 0.0) throw std::invalid_argument("grid must start at or above 0");

  auto grid_sup = [&](double threshold) {
    for (std::size_t i = grid.size(); i-- > 0;) {
      if (h[i] > threshold) {
        if (i + 1 == grid.size()) {
          throw InsufficientDomain(
              "h still exceeds a level threshold at the end of the grid");
        }
        return grid[i];
      }
    }
    return 0.0;
  };

  std::vector<double> breakpoints;
  std::vector<double> values{1.0};
  breakpoints.reserve(levels);
  double prev = grid_sup(1.0);
  breakpoints.push_back(prev);
  for (std::size_t k = 1; k < levels; ++k) {
    const double kp1 = static_cast<double>(k + 1);
    const double x = std::max(kp1 * prev, grid_sup(1.0 / (kp1 * kp1)));
    if (x > grid.back()) {
      throw InsufficientDomain("grid too short to resolve the requested number of levels");
    }
    breakpoints.push_back(x);
    values.push_back(kp1);
    prev = x;
  }
  values.push_back(static_cast<double>(levels + 1));
  return StepFunction(std::move(breakpoints), std::move(values), continuity);
}

}  // namespace gwi
