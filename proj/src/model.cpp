#include "mopvrp/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mopvrp {

std::string_view to_string(Variant v) { return v == Variant::Mop ? "mop" : "cp"; }

Variant parse_variant(std::string_view text) {
  if (text == "mop") return Variant::Mop;
  if (text == "cp") return Variant::Cp;
  throw InputError("unknown variant '" + std::string(text) + "' (expected mop or cp)");
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Capacity: return "capacity";
    case ViolationKind::Duration: return "duration";
    case ViolationKind::Coverage: return "coverage";
    case ViolationKind::MachineAssignment: return "machine-assignment";
    case ViolationKind::DepartureBeforeZero: return "departure-before-zero";
  }
  return "unknown";
}

double FeasibilityReport::total_violation() const {
  double total = 0.0;
  for (const auto& v : violations) {
    if (v.kind == ViolationKind::Capacity || v.kind == ViolationKind::Duration ||
        v.kind == ViolationKind::DepartureBeforeZero) {
      total += v.magnitude;
    } else {
      total += 1.0;
    }
  }
  return total;
}

void validate_instance(const Instance& inst) {
  const auto n = static_cast<std::size_t>(inst.num_customers());
  auto fail = [&](const std::string& what) {
    throw InputError("instance '" + inst.id + "': " + what);
  };
  if (inst.dist.size() != n + 1 || inst.time.size() != n + 1) fail("matrix size must be n + 1");
  for (std::size_t i = 0; i <= n; ++i) {
    if (inst.dist(i, i) != 0.0 || inst.time(i, i) != 0.0) fail("matrix diagonal must be zero");
    for (std::size_t j = 0; j <= n; ++j) {
      const double c = inst.dist(i, j);
      const double t = inst.time(i, j);
      if (!std::isfinite(c) || !std::isfinite(t) || c < 0.0 || t < 0.0) {
        fail("matrix entries must be finite and nonnegative");
      }
    }
  }
  if (inst.num_vehicles < 1) fail("need at least one vehicle");
  if (inst.machines_per_vehicle < 1) fail("need at least one machine per vehicle");
  if (!(inst.capacity >= 0.0) || !(inst.max_duration >= 0.0) || !(inst.early_production >= 0.0)) {
    fail("capacity, duration and early production must be nonnegative");
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Customer& c = inst.customers[k];
    if (c.id != static_cast<int>(k) + 1) fail("customer ids must be 1..n in order");
    const double fields[] = {c.demand, c.production_time, c.tw_start, c.tw_end, c.service_time};
    for (double f : fields) {
      if (!std::isfinite(f)) fail("customer " + std::to_string(c.id) + " has a non-finite field");
    }
    if (c.demand < 0.0 || c.production_time < 0.0 || c.service_time < 0.0) {
      fail("customer " + std::to_string(c.id) + " has a negative quantity");
    }
    if (c.tw_start > c.tw_end) fail("customer " + std::to_string(c.id) + " has a_i > b_i");
  }
}

MopSolution MopSolution::empty(const Instance& inst) {
  MopSolution sol;
  sol.routes.assign(static_cast<std::size_t>(inst.num_vehicles), {});
  sol.machine_of.assign(static_cast<std::size_t>(inst.num_customers()) + 1, -1);
  return sol;
}

CpSolution CpSolution::empty(const Instance& inst) {
  CpSolution sol;
  sol.routes.assign(static_cast<std::size_t>(inst.num_vehicles), {});
  sol.machine_jobs.assign(static_cast<std::size_t>(inst.num_depot_machines()), {});
  return sol;
}

namespace {

Violation make_violation(ViolationKind kind, int route, int customer, double magnitude,
                         std::string detail) {
  return Violation{kind, route, customer, magnitude, std::move(detail)};
}

// Coverage checks shared by both variants; fills route_of.
void check_routes(const Instance& inst, const std::vector<Route>& routes, Coverage coverage,
                  std::vector<int>& route_of, std::vector<Violation>& out) {
  const int n = inst.num_customers();
  route_of.assign(static_cast<std::size_t>(n) + 1, -1);
  if (static_cast<int>(routes.size()) > inst.num_vehicles) {
    out.push_back(make_violation(ViolationKind::Coverage, -1, -1,
                                 static_cast<double>(routes.size()) - inst.num_vehicles,
                                 "more routes than vehicles"));
  }
  for (std::size_t r = 0; r < routes.size(); ++r) {
    for (int c : routes[r]) {
      if (c < 1 || c > n) {
        out.push_back(make_violation(ViolationKind::Coverage, static_cast<int>(r), c, 1.0,
                                     "unknown customer id"));
        continue;
      }
      if (route_of[static_cast<std::size_t>(c)] != -1) {
        out.push_back(make_violation(ViolationKind::Coverage, static_cast<int>(r), c, 1.0,
                                     "customer visited more than once"));
        continue;
      }
      route_of[static_cast<std::size_t>(c)] = static_cast<int>(r);
    }
  }
  if (coverage == Coverage::Complete) {
    for (int c = 1; c <= n; ++c) {
      if (route_of[static_cast<std::size_t>(c)] == -1) {
        out.push_back(make_violation(ViolationKind::Coverage, -1, c, 1.0, "customer not routed"));
      }
    }
  }
}

std::string describe(const std::vector<Violation>& violations) {
  std::ostringstream os;
  os << "structurally invalid solution:";
  for (const auto& v : violations) {
    os << " [" << to_string(v.kind);
    if (v.route >= 0) os << " route " << v.route;
    if (v.customer >= 0) os << " customer " << v.customer;
    os << ": " << v.detail << "]";
  }
  return os.str();
}

Timeline blank_timeline(const Instance& inst, std::size_t num_routes) {
  const auto size = static_cast<std::size_t>(inst.num_customers()) + 1;
  Timeline tl;
  tl.route_of.assign(size, -1);
  tl.prod_start.assign(size, 0.0);
  tl.prod_end.assign(size, 0.0);
  tl.arrival.assign(size, 0.0);
  tl.service_start.assign(size, 0.0);
  tl.delay.assign(size, 0.0);
  tl.route_departure.assign(num_routes, 0.0);
  tl.route_return.assign(num_routes, 0.0);
  tl.route_travel.assign(num_routes, 0.0);
  tl.route_delay.assign(num_routes, 0.0);
  tl.route_load.assign(num_routes, 0.0);
  return tl;
}

// Walks one route from its departure time; prod_end must be filled already
// (MoP) or ignored (CP).
void time_route(const Instance& inst, const Route& route, std::size_t r, bool wait_for_production,
                Timeline& tl) {
  double clock = tl.route_departure[r];
  int prev = 0;
  double travel = 0.0;
  double delay = 0.0;
  double load = 0.0;
  for (int c : route) {
    const auto cu = static_cast<std::size_t>(c);
    const Customer& cust = inst.customer(c);
    const double arrival = clock + inst.time(static_cast<std::size_t>(prev), cu);
    double start = std::max(arrival, cust.tw_start);
    if (wait_for_production) start = std::max(start, tl.prod_end[cu]);
    tl.arrival[cu] = arrival;
    tl.service_start[cu] = start;
    tl.delay[cu] = std::max(0.0, start - cust.tw_end);
    travel += inst.dist(static_cast<std::size_t>(prev), cu);
    delay += tl.delay[cu];
    load += cust.demand;
    clock = start + cust.service_time;
    prev = c;
  }
  if (!route.empty()) {
    travel += inst.dist(static_cast<std::size_t>(prev), 0);
    clock += inst.time(static_cast<std::size_t>(prev), 0);
  }
  tl.route_return[r] = clock;
  tl.route_travel[r] = travel;
  tl.route_delay[r] = delay;
  tl.route_load[r] = load;
}

void finish_totals(const Instance& inst, Timeline& tl) {
  tl.travel_cost = 0.0;
  tl.delay_cost = 0.0;
  for (std::size_t r = 0; r < tl.route_travel.size(); ++r) {
    tl.travel_cost += tl.route_travel[r];
    tl.delay_cost += tl.route_delay[r];
  }
  tl.objective = inst.weights.travel * tl.travel_cost + inst.weights.delay * tl.delay_cost;
}

}  // namespace

std::vector<Violation> structural_violations(const Instance& inst, const MopSolution& sol,
                                             Coverage coverage) {
  std::vector<Violation> out;
  std::vector<int> route_of;
  check_routes(inst, sol.routes, coverage, route_of, out);
  const int n = inst.num_customers();
  if (static_cast<int>(sol.machine_of.size()) != n + 1) {
    out.push_back(make_violation(ViolationKind::MachineAssignment, -1, -1, 1.0,
                                 "machine_of must have n + 1 entries"));
    return out;
  }
  for (int c = 1; c <= n; ++c) {
    const int l = sol.machine_of[static_cast<std::size_t>(c)];
    const bool routed = route_of[static_cast<std::size_t>(c)] != -1;
    if (routed && (l < 0 || l >= inst.machines_per_vehicle)) {
      out.push_back(make_violation(ViolationKind::MachineAssignment,
                                   route_of[static_cast<std::size_t>(c)], c, 1.0,
                                   "routed customer has no valid machine"));
    } else if (!routed && l != -1) {
      out.push_back(make_violation(ViolationKind::MachineAssignment, -1, c, 1.0,
                                   "machine assigned to an unrouted customer"));
    }
  }
  return out;
}

std::vector<Violation> structural_violations(const Instance& inst, const CpSolution& sol,
                                             Coverage coverage) {
  std::vector<Violation> out;
  std::vector<int> route_of;
  check_routes(inst, sol.routes, coverage, route_of, out);
  const int n = inst.num_customers();
  if (static_cast<int>(sol.machine_jobs.size()) != inst.num_depot_machines()) {
    out.push_back(make_violation(ViolationKind::MachineAssignment, -1, -1, 1.0,
                                 "need exactly m * kappa depot machines"));
  }
  std::vector<int> seen(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& jobs : sol.machine_jobs) {
    for (int c : jobs) {
      if (c < 1 || c > n) {
        out.push_back(make_violation(ViolationKind::MachineAssignment, -1, c, 1.0,
                                     "unknown customer on a machine"));
        continue;
      }
      if (++seen[static_cast<std::size_t>(c)] > 1) {
        out.push_back(make_violation(ViolationKind::MachineAssignment, -1, c, 1.0,
                                     "job scheduled more than once"));
      }
    }
  }
  for (int c = 1; c <= n; ++c) {
    const auto cu = static_cast<std::size_t>(c);
    if (route_of[cu] != -1 && seen[cu] == 0) {
      out.push_back(make_violation(ViolationKind::MachineAssignment, route_of[cu], c, 1.0,
                                   "routed customer has no production job"));
    } else if (route_of[cu] == -1 && seen[cu] > 0) {
      out.push_back(make_violation(ViolationKind::MachineAssignment, -1, c, 1.0,
                                   "job scheduled for an unrouted customer"));
    }
  }
  return out;
}

Timeline evaluate_mop(const Instance& inst, const MopSolution& sol, Coverage coverage) {
  if (auto v = structural_violations(inst, sol, coverage); !v.empty()) throw InputError(describe(v));
  Timeline tl = blank_timeline(inst, sol.routes.size());
  std::vector<double> machine_free(static_cast<std::size_t>(inst.machines_per_vehicle));
  for (std::size_t r = 0; r < sol.routes.size(); ++r) {
    std::fill(machine_free.begin(), machine_free.end(), 0.0);
    for (int c : sol.routes[r]) {
      const auto cu = static_cast<std::size_t>(c);
      double& free_at = machine_free[static_cast<std::size_t>(sol.machine_of[cu])];
      tl.route_of[cu] = static_cast<int>(r);
      tl.prod_start[cu] = free_at;
      tl.prod_end[cu] = free_at + inst.customer(c).production_time;
      free_at = tl.prod_end[cu];
    }
    tl.route_departure[r] = 0.0;
    time_route(inst, sol.routes[r], r, /*wait_for_production=*/true, tl);
  }
  finish_totals(inst, tl);
  return tl;
}

Timeline evaluate_mop_schedule(const Instance& inst, const std::vector<Route>& routes,
                               const std::vector<std::vector<std::vector<int>>>& schedules) {
  std::vector<Violation> problems;
  std::vector<int> route_of;
  check_routes(inst, routes, Coverage::Complete, route_of, problems);
  if (schedules.size() != routes.size()) {
    problems.push_back(make_violation(ViolationKind::MachineAssignment, -1, -1, 1.0,
                                      "need one schedule set per route"));
  }
  if (!problems.empty()) throw InputError(describe(problems));

  Timeline tl = blank_timeline(inst, routes.size());
  std::vector<int> produced(static_cast<std::size_t>(inst.num_customers()) + 1, 0);
  for (std::size_t r = 0; r < routes.size(); ++r) {
    if (static_cast<int>(schedules[r].size()) > inst.machines_per_vehicle) {
      throw InputError("route " + std::to_string(r) + " uses more machines than installed");
    }
    for (const auto& order : schedules[r]) {
      double free_at = 0.0;
      for (int c : order) {
        if (c < 1 || c > inst.num_customers() || route_of[static_cast<std::size_t>(c)] !=
                                                     static_cast<int>(r)) {
          throw InputError("schedule of route " + std::to_string(r) +
                           " contains a customer it does not serve");
        }
        const auto cu = static_cast<std::size_t>(c);
        ++produced[cu];
        tl.prod_start[cu] = free_at;
        tl.prod_end[cu] = free_at + inst.customer(c).production_time;
        free_at = tl.prod_end[cu];
      }
    }
    for (int c : routes[r]) {
      if (produced[static_cast<std::size_t>(c)] != 1) {
        throw InputError("customer " + std::to_string(c) + " must be produced exactly once");
      }
      tl.route_of[static_cast<std::size_t>(c)] = static_cast<int>(r);
    }
    time_route(inst, routes[r], r, /*wait_for_production=*/true, tl);
  }
  finish_totals(inst, tl);
  return tl;
}

Timeline evaluate_cp(const Instance& inst, const CpSolution& sol, Coverage coverage) {
  if (auto v = structural_violations(inst, sol, coverage); !v.empty()) throw InputError(describe(v));
  Timeline tl = blank_timeline(inst, sol.routes.size());
  for (std::size_t r = 0; r < sol.routes.size(); ++r) {
    for (int c : sol.routes[r]) tl.route_of[static_cast<std::size_t>(c)] = static_cast<int>(r);
  }
  std::vector<double> ready(sol.routes.size(), 0.0);
  for (const auto& jobs : sol.machine_jobs) {
    double free_at = -inst.early_production;
    for (int c : jobs) {
      const auto cu = static_cast<std::size_t>(c);
      tl.prod_start[cu] = free_at;
      tl.prod_end[cu] = free_at + inst.customer(c).production_time;
      free_at = tl.prod_end[cu];
      const auto r = static_cast<std::size_t>(tl.route_of[cu]);
      ready[r] = std::max(ready[r], free_at);
    }
  }
  for (std::size_t r = 0; r < sol.routes.size(); ++r) {
    tl.route_departure[r] = ready[r];
    time_route(inst, sol.routes[r], r, /*wait_for_production=*/false, tl);
  }
  finish_totals(inst, tl);
  return tl;
}

double timing_violation(const Instance& inst, const Timeline& tl) {
  double total = 0.0;
  for (std::size_t r = 0; r < tl.route_return.size(); ++r) {
    if (tl.route_load[r] > inst.capacity + kTolerance) total += tl.route_load[r] - inst.capacity;
    if (tl.route_return[r] > inst.max_duration + kTolerance) {
      total += tl.route_return[r] - inst.max_duration;
    }
  }
  return total;
}

namespace {

void append_timing_violations(const Instance& inst, const std::vector<Route>& routes,
                              const Timeline& tl, FeasibilityReport& report) {
  for (std::size_t r = 0; r < routes.size(); ++r) {
    const int ri = static_cast<int>(r);
    if (tl.route_load[r] > inst.capacity + kTolerance) {
      report.violations.push_back(make_violation(ViolationKind::Capacity, ri, -1,
                                                 tl.route_load[r] - inst.capacity,
                                                 "route load exceeds capacity"));
    }
    if (tl.route_return[r] > inst.max_duration + kTolerance) {
      report.violations.push_back(make_violation(ViolationKind::Duration, ri, -1,
                                                 tl.route_return[r] - inst.max_duration,
                                                 "route returns after the duration limit"));
    }
    if (tl.route_departure[r] < -kTolerance) {
      report.violations.push_back(make_violation(ViolationKind::DepartureBeforeZero, ri, -1,
                                                 -tl.route_departure[r],
                                                 "route departs before time 0"));
    }
  }
}

// Loads can be reported even when the solution is structurally broken.
void append_capacity_only(const Instance& inst, const std::vector<Route>& routes,
                          FeasibilityReport& report) {
  const int n = inst.num_customers();
  for (std::size_t r = 0; r < routes.size(); ++r) {
    double load = 0.0;
    for (int c : routes[r]) {
      if (c >= 1 && c <= n) load += inst.customer(c).demand;
    }
    if (load > inst.capacity + kTolerance) {
      report.violations.push_back(make_violation(ViolationKind::Capacity, static_cast<int>(r), -1,
                                                 load - inst.capacity,
                                                 "route load exceeds capacity"));
    }
  }
}

template <class Solution, class Evaluate>
FeasibilityReport check_impl(const Instance& inst, const Solution& sol, Coverage coverage,
                             Evaluate evaluate_fn) {
  FeasibilityReport report;
  report.violations = structural_violations(inst, sol, coverage);
  if (report.violations.empty()) {
    const Timeline tl = evaluate_fn(inst, sol, coverage);
    append_timing_violations(inst, sol.routes, tl, report);
  } else {
    append_capacity_only(inst, sol.routes, report);
  }
  report.feasible = report.violations.empty();
  return report;
}

}  // namespace

FeasibilityReport check_feasibility(const Instance& inst, const MopSolution& sol,
                                    Coverage coverage) {
  return check_impl(inst, sol, coverage,
                    [](const Instance& i, const MopSolution& s, Coverage c) {
                      return evaluate_mop(i, s, c);
                    });
}

FeasibilityReport check_feasibility(const Instance& inst, const CpSolution& sol,
                                    Coverage coverage) {
  return check_impl(inst, sol, coverage,
                    [](const Instance& i, const CpSolution& s, Coverage c) {
                      return evaluate_cp(i, s, c);
                    });
}

std::vector<int> gather_machine_jobs(const std::vector<int>& jobs,
                                     const std::vector<int>& route_of) {
  std::vector<int> remaining = jobs;
  std::vector<int> gathered;
  gathered.reserve(jobs.size());
  // Built back to front: the last remaining job anchors its route's group.
  std::vector<std::vector<int>> groups;
  while (!remaining.empty()) {
    const int r = route_of[static_cast<std::size_t>(remaining.back())];
    std::vector<int> group;
    std::vector<int> rest;
    for (int c : remaining) {
      (route_of[static_cast<std::size_t>(c)] == r ? group : rest).push_back(c);
    }
    groups.push_back(std::move(group));
    remaining = std::move(rest);
  }
  for (auto it = groups.rbegin(); it != groups.rend(); ++it) {
    gathered.insert(gathered.end(), it->begin(), it->end());
  }
  return gathered;
}

CpSolution gather_jobs(const Instance& inst, const CpSolution& sol) {
  std::vector<int> route_of(static_cast<std::size_t>(inst.num_customers()) + 1, -1);
  for (std::size_t r = 0; r < sol.routes.size(); ++r) {
    for (int c : sol.routes[r]) route_of[static_cast<std::size_t>(c)] = static_cast<int>(r);
  }
  CpSolution out = sol;
  for (auto& jobs : out.machine_jobs) jobs = gather_machine_jobs(jobs, route_of);
  return out;
}

}  // namespace mopvrp
