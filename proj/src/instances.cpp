#include "mopvrp/instances.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "mopvrp/search.hpp"

namespace mopvrp {

namespace {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

void fill_euclidean(Instance& inst, const std::vector<Point>& pts, double dist_scale,
                    double minutes_per_unit) {
  const std::size_t size = pts.size();
  inst.dist = Matrix(size);
  inst.time = Matrix(size);
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      if (i == j) continue;
      const double d = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y) * dist_scale;
      inst.dist(i, j) = d;
      inst.time(i, j) = d * minutes_per_unit;
    }
  }
}

std::vector<double> numbers_on(const std::string& line) {
  std::istringstream in(line);
  std::vector<double> out;
  double v = 0.0;
  while (in >> v) out.push_back(v);
  if (!in.eof()) return {};  // trailing non-numeric text
  return out;
}

[[noreturn]] void parse_error(int line, const std::string& what) {
  throw InputError("solomon line " + std::to_string(line) + ": " + what);
}

}  // namespace

Instance parse_solomon(std::string_view text, std::string id) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  enum class State { Name, SeekVehicle, VehicleNumbers, SeekCustomer, Rows } state = State::Name;

  Instance inst;
  std::vector<Point> pts;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const bool blank = line.find_first_not_of(" \t") == std::string::npos;
    if (blank) continue;
    std::string upper = line;
    std::transform(upper.begin(), upper.end(), upper.begin(), ::toupper);

    switch (state) {
      case State::Name: {
        std::istringstream name(line);
        std::string first;
        name >> first;
        if (id.empty()) id = first;
        state = State::SeekVehicle;
        break;
      }
      case State::SeekVehicle:
        if (upper.find("VEHICLE") == std::string::npos) parse_error(line_no, "expected VEHICLE");
        state = State::VehicleNumbers;
        break;
      case State::VehicleNumbers: {
        if (upper.find("NUMBER") != std::string::npos) break;  // column header
        const auto v = numbers_on(line);
        if (v.size() != 2) parse_error(line_no, "expected vehicle number and capacity");
        if (v[0] < 1 || v[0] != std::floor(v[0])) parse_error(line_no, "bad vehicle number");
        inst.num_vehicles = static_cast<int>(v[0]);
        inst.capacity = v[1];
        state = State::SeekCustomer;
        break;
      }
      case State::SeekCustomer:
        if (upper.find("CUSTOMER") == std::string::npos) parse_error(line_no, "expected CUSTOMER");
        state = State::Rows;
        break;
      case State::Rows: {
        if (upper.find("CUST") != std::string::npos || upper.find("XCOORD") != std::string::npos) {
          break;  // column header
        }
        const auto v = numbers_on(line);
        if (v.size() != 7) parse_error(line_no, "expected 7 numeric columns");
        const int expected = static_cast<int>(pts.size());
        if (v[0] != expected) {
          parse_error(line_no, "expected customer number " + std::to_string(expected));
        }
        pts.push_back({v[1], v[2]});
        if (expected == 0) {
          inst.max_duration = v[5];
        } else {
          Customer c;
          c.id = expected;
          c.demand = v[3];
          c.tw_start = v[4];
          c.tw_end = v[5];
          c.service_time = v[6];
          if (c.tw_start > c.tw_end) parse_error(line_no, "ready time after due date");
          inst.customers.push_back(c);
        }
        break;
      }
    }
  }
  if (state != State::Rows || pts.empty()) {
    parse_error(line_no, "unexpected end of input (missing vehicle or customer section)");
  }
  inst.id = std::move(id);
  fill_euclidean(inst, pts, 1.0, 1.0);
  validate_instance(inst);
  return inst;
}

double early_production_horizon(const Instance& inst, double epsilon) {
  double total = 0.0;
  for (const auto& c : inst.customers) total += c.production_time;
  return epsilon * total / (inst.machines_per_vehicle * inst.num_vehicles);
}

namespace {
void size_fleet(Instance& inst) {
  const FleetSize fleet = fleet_size(inst);
  if (!fleet.unroutable.empty()) {
    throw InputError("customer " + std::to_string(fleet.unroutable.front()) +
                     " cannot be served within capacity and duration even alone");
  }
  inst.num_vehicles = std::max(fleet.vehicles, 1);
}
}  // namespace

Instance derive_benchmark(const Instance& base, double mu, int machines, Variant variant,
                          double epsilon) {
  if (machines < 1) throw InputError("machines per vehicle must be >= 1");
  if (mu < 0) throw InputError("mu must be >= 0");
  Instance inst = base;
  for (auto& c : inst.customers) c.production_time = mu * c.demand;
  inst.machines_per_vehicle = machines;
  inst.early_production = 0.0;
  size_fleet(inst);
  if (variant == Variant::Cp) {
    inst.early_production = early_production_horizon(inst, epsilon);
    inst.max_duration = 10.0 * base.max_duration;
  }
  return inst;
}

std::string ScenarioSpec::label() const {
  return std::string(1, production_class) + "_" + std::string(1, window_class);
}

std::string ScenarioSpec::file_stem() const {
  return label() + "_" + std::to_string(n) + "_" + std::to_string(seed);
}

ScenarioSpec parse_scenario(std::string_view label) {
  if (label.size() != 3 || label[1] != '_' || std::string_view("SMH").find(label[0]) == std::string_view::npos ||
      std::string_view("WT").find(label[2]) == std::string_view::npos) {
    throw InputError("unknown scenario '" + std::string(label) + "' (expected S|M|H _ W|T)");
  }
  ScenarioSpec spec;
  spec.production_class = label[0];
  spec.window_class = label[2];
  return spec;
}

Instance gen_realistic(const ScenarioSpec& spec) {
  parse_scenario(spec.label());
  if (spec.n < 1 || spec.n > 99) throw InputError("realistic instances have 1..99 customers");
  if (spec.machines < 1) throw InputError("machines per vehicle must be >= 1");

  std::mt19937_64 rng(spec.seed);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

  constexpr int kPoints = 100;
  std::vector<Point> all(kPoints);
  for (auto& p : all) p = {uniform(0.0, kRealisticWidthKm), uniform(0.0, kRealisticHeightKm)};

  double p_lo = 20.0, p_hi = 30.0;
  if (spec.production_class == 'M') p_lo = 30.0, p_hi = 40.0;
  if (spec.production_class == 'H') p_lo = 30.0, p_hi = 60.0;
  const double w_lo = spec.window_class == 'W' ? 30.0 : kTightWindowMin;
  const double w_hi = spec.window_class == 'W' ? 60.0 : 30.0;

  std::vector<Customer> pool(kPoints - 1);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    Customer& c = pool[i];
    c.demand = 1.0;
    c.service_time = std::uniform_int_distribution<int>(1, 5)(rng);
    c.production_time = uniform(p_lo, p_hi);
    const double length = uniform(w_lo, w_hi);
    c.tw_start = uniform(0.0, kRealisticHorizon - length);
    c.tw_end = c.tw_start + length;
  }

  // Subsample after drawing everything so n = 25/50 are subsets of the 99.
  std::vector<std::size_t> chosen(pool.size());
  for (std::size_t i = 0; i < chosen.size(); ++i) chosen[i] = i;
  if (spec.n < static_cast<int>(pool.size())) {
    for (std::size_t i = 0; i < static_cast<std::size_t>(spec.n); ++i) {
      const auto j = std::uniform_int_distribution<std::size_t>(i, chosen.size() - 1)(rng);
      std::swap(chosen[i], chosen[j]);
    }
    chosen.resize(static_cast<std::size_t>(spec.n));
    std::sort(chosen.begin(), chosen.end());
  }

  Instance inst;
  inst.id = spec.file_stem();
  std::vector<Point> pts{all[0]};
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    Customer c = pool[chosen[k]];
    c.id = static_cast<int>(k) + 1;
    inst.customers.push_back(c);
    pts.push_back(all[chosen[k] + 1]);
  }
  fill_euclidean(inst, pts, kCircuityFactor, 60.0 / kSpeedKmPerHour);
  inst.capacity = spec.n;
  inst.max_duration = kRealisticHorizon;
  inst.machines_per_vehicle = spec.machines;
  inst.num_vehicles = spec.n;
  size_fleet(inst);
  inst.early_production = early_production_horizon(inst, kDefaultEarlyProductionCoefficient);
  validate_instance(inst);
  return inst;
}

}  // namespace mopvrp
