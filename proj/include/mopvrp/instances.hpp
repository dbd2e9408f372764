#pragma once

// Instance acquisition: Solomon-format parsing, benchmark derivation and the
// synthetic realistic scenarios.

#include <cstdint>
#include <string>
#include <string_view>

#include "mopvrp/model.hpp"

namespace mopvrp {

/// Solomon / Gehring-Homberger text. Euclidean distances, travel time equal to
/// distance, D = depot due date, fleet and capacity from the VEHICLE block.
/// Throws InputError with the offending line number.
Instance parse_solomon(std::string_view text, std::string id = "");

inline constexpr double kDefaultEarlyProductionCoefficient = 0.75;

/// p_i = mu * d_i, m machines per vehicle, kappa from fleet_size. For CP the
/// early-production horizon is epsilon * P / (m * kappa) with P = sum p_i and
/// the duration limit is ten times the original. Throws InputError if some
/// customer cannot be served even alone.
Instance derive_benchmark(const Instance& base, double mu, int machines, Variant variant,
                          double epsilon = kDefaultEarlyProductionCoefficient);

/// Early-production horizon epsilon * P / (m * kappa).
double early_production_horizon(const Instance& inst, double epsilon);

struct ScenarioSpec {
  char production_class = 'S';  // S, M or H
  char window_class = 'W';      // W (wide) or T (tight)
  int n = 99;                   // 25, 50 or 99
  std::uint64_t seed = 1;
  int machines = 1;

  /// "S_W" style label.
  std::string label() const;
  /// <scenario>_<n>_<seed>
  std::string file_stem() const;
};

/// Parses "S_W" .. "H_T". Throws InputError otherwise.
ScenarioSpec parse_scenario(std::string_view label);

inline constexpr double kRealisticWidthKm = 20.0;
inline constexpr double kRealisticHeightKm = 30.0;
inline constexpr double kCircuityFactor = 1.3;
inline constexpr double kSpeedKmPerHour = 50.0;
inline constexpr double kRealisticHorizon = 600.0;
inline constexpr double kTightWindowMin = 10.0;

/// Synthetic city instance: 100 random points (first is the depot), road
/// distance = Euclidean x circuity, 50 km/h, 600-minute horizon, unit demand
/// with non-binding capacity, kappa from fleet_size and the default
/// early-production horizon. Smaller n subsamples the 99 customers.
Instance gen_realistic(const ScenarioSpec& spec);

}  // namespace mopvrp
