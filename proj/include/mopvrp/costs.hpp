#pragma once

// Long-term operating cost of a mobile-production fleet: investment plus
// yearly costs over a planning horizon. Money is held in integer cents.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace mopvrp {

using Cents = std::int64_t;

Cents to_cents(double euros);
double to_euros(Cents cents);

struct CostTable {
  Cents driver_year_cost = 6'390'800;
  Cents vehicle_price = 5'400'000;
  Cents vehicle_maint_per_year = 540'000;
  Cents printer_price = 230'000;
  Cents printer_maint_per_year = 34'500;
  Cents printer_renewal_per_year = 65'000;
  double fuel_econ = 8.08;  // miles per litre
  Cents fuel_price = 110;   // per litre
  int work_days_per_year = 250;
  int horizon_years = 10;

  Cents printer_yearly() const { return printer_maint_per_year + printer_renewal_per_year; }
  /// Throws std::invalid_argument unless every field is positive.
  void validate() const;
};

/// Overrides the defaults with any fields present (amounts in euros).
CostTable read_cost_table_json(std::string_view text);
std::string write_cost_table_json(const CostTable& table);

struct CostInputs {
  double avg_travel_per_day = 0.0;  // miles
  double avg_vehicles = 0.0;        // drivers needed per day
  int fleet_to_buy = 0;
  int printers_to_buy = 0;
  int n_customers = 0;              // orders per day
};

struct CostBreakdown {
  Cents invest_vehicles = 0;
  Cents invest_printers = 0;
  Cents invest_total = 0;
  Cents yearly_vehicle_maint = 0;
  Cents yearly_printers = 0;
  Cents yearly_drivers = 0;
  Cents yearly_fuel = 0;
  Cents yearly_total = 0;
  Cents total_over_horizon = 0;
  Cents cost_per_year = 0;
  std::int64_t orders_per_year = 0;
  double cost_per_order = 0.0;  // euros
};

CostBreakdown estimate(const CostInputs& in, const CostTable& table = {});

/// Header plus one row in the column order of the long-term cost table,
/// amounts in euros with one decimal.
void write_cost_csv(std::ostream& out, const CostInputs& in, const CostBreakdown& b,
                    bool header = true);

}  // namespace mopvrp
