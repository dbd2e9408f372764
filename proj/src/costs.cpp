#include "mopvrp/costs.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "mopvrp/model.hpp"

namespace mopvrp {

Cents to_cents(double euros) { return std::llround(euros * 100.0); }
double to_euros(Cents cents) { return static_cast<double>(cents) / 100.0; }

void CostTable::validate() const {
  if (driver_year_cost <= 0 || vehicle_price <= 0 || vehicle_maint_per_year <= 0 ||
      printer_price <= 0 || printer_maint_per_year <= 0 || printer_renewal_per_year <= 0 ||
      !(fuel_econ > 0) || fuel_price <= 0 || work_days_per_year <= 0 || horizon_years <= 0) {
    throw std::invalid_argument("cost table entries must all be positive");
  }
}

CostTable read_cost_table_json(std::string_view text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("cost table: expected an object");
  CostTable t;
  const std::set<std::string> money{"driver_year_cost",       "vehicle_price",
                                    "vehicle_maint_per_year", "printer_price",
                                    "printer_maint_per_year", "printer_renewal_per_year",
                                    "fuel_price"};
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    if (!item.value().is_number()) throw InputError("cost table: '" + key + "' must be a number");
    const double v = item.value().get<double>();
    if (key == "driver_year_cost") t.driver_year_cost = to_cents(v);
    else if (key == "vehicle_price") t.vehicle_price = to_cents(v);
    else if (key == "vehicle_maint_per_year") t.vehicle_maint_per_year = to_cents(v);
    else if (key == "printer_price") t.printer_price = to_cents(v);
    else if (key == "printer_maint_per_year") t.printer_maint_per_year = to_cents(v);
    else if (key == "printer_renewal_per_year") t.printer_renewal_per_year = to_cents(v);
    else if (key == "fuel_price") t.fuel_price = to_cents(v);
    else if (key == "fuel_econ") t.fuel_econ = v;
    else if (key == "work_days_per_year") t.work_days_per_year = item.value().get<int>();
    else if (key == "horizon_years") t.horizon_years = item.value().get<int>();
    else throw InputError("cost table: unknown field '" + key + "'");
  }
  try {
    t.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return t;
}

std::string write_cost_table_json(const CostTable& t) {
  nlohmann::json j = {{"driver_year_cost", to_euros(t.driver_year_cost)},
                      {"vehicle_price", to_euros(t.vehicle_price)},
                      {"vehicle_maint_per_year", to_euros(t.vehicle_maint_per_year)},
                      {"printer_price", to_euros(t.printer_price)},
                      {"printer_maint_per_year", to_euros(t.printer_maint_per_year)},
                      {"printer_renewal_per_year", to_euros(t.printer_renewal_per_year)},
                      {"fuel_econ", t.fuel_econ},
                      {"fuel_price", to_euros(t.fuel_price)},
                      {"work_days_per_year", t.work_days_per_year},
                      {"horizon_years", t.horizon_years}};
  return j.dump(1) + "\n";
}

CostBreakdown estimate(const CostInputs& in, const CostTable& table) {
  table.validate();
  CostBreakdown b;
  b.invest_vehicles = in.fleet_to_buy * table.vehicle_price;
  b.invest_printers = in.printers_to_buy * table.printer_price;
  b.invest_total = b.invest_vehicles + b.invest_printers;

  b.yearly_vehicle_maint = in.fleet_to_buy * table.vehicle_maint_per_year;
  b.yearly_printers = in.printers_to_buy * table.printer_yearly();
  b.yearly_drivers = std::llround(in.avg_vehicles * static_cast<double>(table.driver_year_cost));
  const double litres = in.avg_travel_per_day * table.work_days_per_year / table.fuel_econ;
  b.yearly_fuel = std::llround(litres * static_cast<double>(table.fuel_price));
  b.yearly_total = b.yearly_vehicle_maint + b.yearly_printers + b.yearly_drivers + b.yearly_fuel;

  b.total_over_horizon = b.invest_total + table.horizon_years * b.yearly_total;
  b.cost_per_year = std::llround(static_cast<double>(b.total_over_horizon) / table.horizon_years);
  b.orders_per_year = static_cast<std::int64_t>(in.n_customers) * table.work_days_per_year;
  b.cost_per_order = b.orders_per_year > 0
                         ? to_euros(b.total_over_horizon) / table.horizon_years /
                               static_cast<double>(b.orders_per_year)
                         : 0.0;
  return b;
}

void write_cost_csv(std::ostream& out, const CostInputs& in, const CostBreakdown& b, bool header) {
  if (header) {
    out << "avg_vehicles,avg_travel,vehicles_bought,printers_bought,invest_vehicles,"
           "invest_printers,invest_total,maint_vehicles,yearly_printers,wages,fuel,yearly_total,"
           "total_horizon,cost_per_year,orders_per_year,cost_per_order\n";
  }
  char line[512];
  std::snprintf(line, sizeof line,
                "%.1f,%.1f,%d,%d,%.1f,%.1f,%.1f,%.1f,%.1f,%.1f,%.1f,%.1f,%.1f,%.1f,%lld,%.1f\n",
                in.avg_vehicles, in.avg_travel_per_day, in.fleet_to_buy, in.printers_to_buy,
                to_euros(b.invest_vehicles), to_euros(b.invest_printers), to_euros(b.invest_total),
                to_euros(b.yearly_vehicle_maint), to_euros(b.yearly_printers),
                to_euros(b.yearly_drivers), to_euros(b.yearly_fuel), to_euros(b.yearly_total),
                to_euros(b.total_over_horizon), to_euros(b.cost_per_year),
                static_cast<long long>(b.orders_per_year), b.cost_per_order);
  out << line;
}

}  // namespace mopvrp
