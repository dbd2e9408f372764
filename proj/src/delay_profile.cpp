#include "mopvrp/delay_profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace mopvrp {

DelayProfile DelayProfile::build(const Instance& inst, std::span<const int> route) {
  DelayProfile p;
  if (route.empty()) {
    p.max_departure_ = inst.max_duration;
    return p;
  }

  // Service start of the j-th customer is max(psi + shift, floor).
  double shift = 0.0;
  double floor = -std::numeric_limits<double>::infinity();
  int prev = 0;
  int initial_slope = 0;
  std::vector<double> thresholds;
  thresholds.reserve(route.size());

  for (int c : route) {
    const Customer& cust = inst.customer(c);
    const double leg = inst.time(static_cast<std::size_t>(prev), static_cast<std::size_t>(c));
    shift += leg;
    floor = std::max(floor + leg, cust.tw_start);

    // delay(psi) = max(late_anyway, psi - (b - shift))
    const double late_anyway = std::max(0.0, floor - cust.tw_end);
    const double threshold = cust.tw_end - shift + late_anyway;
    if (threshold <= 0.0) {
      ++initial_slope;
      p.base_ += std::max(late_anyway, shift - cust.tw_end);
    } else {
      thresholds.push_back(threshold);
      p.base_ += late_anyway;
    }
    shift += cust.service_time;
    floor += cust.service_time;
    prev = c;
  }
  const double back = inst.time(static_cast<std::size_t>(prev), 0);
  shift += back;
  floor += back;
  p.return_shift_ = shift;
  p.return_floor_ = floor;
  p.max_departure_ = floor <= inst.max_duration + kTolerance
                         ? inst.max_duration - shift
                         : -std::numeric_limits<double>::infinity();

  std::sort(thresholds.begin(), thresholds.end());
  p.slopes_.assign(1, initial_slope);
  int slope = initial_slope;
  double value = p.base_;
  double last = 0.0;
  for (double t : thresholds) {
    if (!p.breakpoints_.empty() && t == p.breakpoints_.back()) {
      p.slopes_.back() = ++slope;
      continue;
    }
    value += slope * (t - last);
    last = t;
    p.breakpoints_.push_back(t);
    p.values_.push_back(value);
    p.slopes_.push_back(++slope);
  }
  return p;
}

double DelayProfile::value_at(double psi) const {
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), psi);
  const auto k = static_cast<std::size_t>(it - breakpoints_.begin());
  if (k == 0) return base_ + slopes_[0] * psi;
  return values_[k - 1] + slopes_[k] * (psi - breakpoints_[k - 1]);
}

double DelayProfile::query(double psi) const {
  if (!feasible(psi)) {
    throw InfeasibleDeparture("departure " + std::to_string(psi) +
                              " is outside [0, " + std::to_string(max_departure_) + "]");
  }
  return value_at(psi);
}

}  // namespace mopvrp
