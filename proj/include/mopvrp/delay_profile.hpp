#pragma once

#include <algorithm>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "mopvrp/model.hpp"

namespace mopvrp {

class InfeasibleDeparture : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Total (unweighted) delay of a fixed CP route as a function of its departure
/// time psi >= 0. Each customer's service start is max(psi + A_j, B_j), so its
/// delay is constant until a threshold and then grows with slope 1. The sum is
/// convex, non-decreasing and piecewise linear.
class DelayProfile {
 public:
  DelayProfile() = default;

  static DelayProfile build(const Instance& inst, std::span<const int> route);

  double base_value() const { return base_; }
  /// Strictly increasing departure times (> 0) where the slope changes.
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  /// slopes()[0] applies on [0, breakpoints[0]); slopes()[k] on
  /// [breakpoints[k-1], breakpoints[k]). Always breakpoints().size() + 1 long.
  const std::vector<int>& slopes() const { return slopes_; }
  /// Latest departure with return <= D. Negative (possibly -inf) when no
  /// departure is feasible.
  double max_departure() const { return max_departure_; }

  bool feasible(double psi) const { return psi >= 0.0 && psi <= max_departure_ + kTolerance; }

  /// Delay at departure psi; throws InfeasibleDeparture outside [0, max_departure].
  double query(double psi) const;

  /// Same function without the duration cap (psi >= 0).
  double value_at(double psi) const;

  /// Time the vehicle is back at the depot when leaving at psi.
  double return_time(double psi) const { return std::max(psi + return_shift_, return_floor_); }

 private:
  double base_ = 0.0;
  std::vector<double> breakpoints_;
  std::vector<double> values_;  // value at each breakpoint
  std::vector<int> slopes_{0};
  double max_departure_ = 0.0;
  double return_shift_ = 0.0;
  double return_floor_ = -std::numeric_limits<double>::infinity();
};

}  // namespace mopvrp
