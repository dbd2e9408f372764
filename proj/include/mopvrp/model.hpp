#pragma once

// Problem data, solutions, and the exact evaluators for the mobile-production
// (MoP) and central-production (CP) routing variants.
//
// Node 0 is the depot, customers are 1..n. Times are minutes, distances are
// in objective units. All per-customer vectors are indexed by customer id and
// have size n + 1 (slot 0 unused).

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mopvrp {

inline constexpr double kTolerance = 1e-9;

enum class Variant { Mop, Cp };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view text);

/// Thrown for malformed input: structural solution errors, bad instance data,
/// unparsable files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major square matrix.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct Customer {
  int id = 0;
  double demand = 0.0;
  double production_time = 0.0;
  double tw_start = 0.0;
  double tw_end = 0.0;  // soft: lateness is charged, not forbidden
  double service_time = 0.0;

  bool operator==(const Customer&) const = default;
};

struct Weights {
  double travel = 1.0;
  double delay = 1.0;

  bool operator==(const Weights&) const = default;
};

struct Instance {
  std::string id;
  std::vector<Customer> customers;  // customers[i - 1] has id i
  Matrix dist;                      // (n + 1) x (n + 1)
  Matrix time;                      // (n + 1) x (n + 1)
  int num_vehicles = 1;
  double capacity = 0.0;
  double max_duration = 0.0;
  int machines_per_vehicle = 1;
  double early_production = 0.0;  // CP only; MoP always evaluates with 0
  Weights weights;

  int num_customers() const { return static_cast<int>(customers.size()); }
  int num_depot_machines() const { return machines_per_vehicle * num_vehicles; }
  const Customer& customer(int id) const { return customers[static_cast<std::size_t>(id - 1)]; }

  bool operator==(const Instance&) const = default;
};

/// Throws InputError unless the instance satisfies its data invariants.
void validate_instance(const Instance& inst);

using Route = std::vector<int>;

/// Routes plus a vehicle-machine index per customer. Each machine produces
/// its customers in delivery order, so no explicit schedule is stored.
struct MopSolution {
  std::vector<Route> routes;
  std::vector<int> machine_of;  // size n + 1, -1 when unassigned, else 0..m-1

  static MopSolution empty(const Instance& inst);
  bool operator==(const MopSolution&) const = default;
};

/// Routes plus an explicit ordered job list on each of the m * kappa depot
/// machines.
struct CpSolution {
  std::vector<Route> routes;
  std::vector<std::vector<int>> machine_jobs;

  static CpSolution empty(const Instance& inst);
  bool operator==(const CpSolution&) const = default;
};

struct Timeline {
  std::vector<int> route_of;  // -1 for customers not in any route
  std::vector<double> prod_start;
  std::vector<double> prod_end;
  std::vector<double> arrival;
  std::vector<double> service_start;
  std::vector<double> delay;
  std::vector<double> route_departure;
  std::vector<double> route_return;
  std::vector<double> route_travel;
  std::vector<double> route_delay;
  std::vector<double> route_load;
  double travel_cost = 0.0;
  double delay_cost = 0.0;
  double objective = 0.0;

  bool operator==(const Timeline&) const = default;
};

enum class ViolationKind { Capacity, Duration, Coverage, MachineAssignment, DepartureBeforeZero };

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  int route = -1;
  int customer = -1;
  double magnitude = 0.0;
  std::string detail;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<Violation> violations;

  /// Sum of capacity and duration excess; structural problems count as 1 each.
  double total_violation() const;
};

/// Whether customers may be missing from the routes. Search works on partial
/// solutions; the public contract of a finished solution is Complete.
enum class Coverage { Complete, Partial };

/// Structural problems only (coverage and machine assignment).
std::vector<Violation> structural_violations(const Instance& inst, const MopSolution& sol,
                                             Coverage coverage = Coverage::Complete);
std::vector<Violation> structural_violations(const Instance& inst, const CpSolution& sol,
                                             Coverage coverage = Coverage::Complete);

/// MoP timing: departure at 0, each vehicle machine runs its jobs back to back
/// from 0 in delivery order, service starts at max(arrival, production end,
/// window start). Throws InputError on structural violations.
Timeline evaluate_mop(const Instance& inst, const MopSolution& sol,
                      Coverage coverage = Coverage::Complete);

/// MoP timing with explicit per-vehicle, per-machine production orders
/// (schedules[k][l] is the job order of machine l on vehicle k). Used to probe
/// schedules that are not in delivery order.
Timeline evaluate_mop_schedule(const Instance& inst, const std::vector<Route>& routes,
                               const std::vector<std::vector<std::vector<int>>>& schedules);

/// CP timing: depot machines run back to back from -H, a route departs at
/// max(0, last finish among its products), service starts at
/// max(arrival, window start).
Timeline evaluate_cp(const Instance& inst, const CpSolution& sol,
                     Coverage coverage = Coverage::Complete);

inline Timeline evaluate(const Instance& inst, const MopSolution& sol,
                         Coverage coverage = Coverage::Complete) {
  return evaluate_mop(inst, sol, coverage);
}
inline Timeline evaluate(const Instance& inst, const CpSolution& sol,
                         Coverage coverage = Coverage::Complete) {
  return evaluate_cp(inst, sol, coverage);
}

/// Never throws. Delay is not a violation (soft window).
FeasibilityReport check_feasibility(const Instance& inst, const MopSolution& sol,
                                    Coverage coverage = Coverage::Complete);
FeasibilityReport check_feasibility(const Instance& inst, const CpSolution& sol,
                                    Coverage coverage = Coverage::Complete);

/// Capacity and duration excess of an evaluated solution.
double timing_violation(const Instance& inst, const Timeline& tl);

/// Number of non-empty routes.
template <class Solution>
int vehicles_used(const Solution& sol) {
  int used = 0;
  for (const auto& r : sol.routes) used += r.empty() ? 0 : 1;
  return used;
}

/// Gather on one depot machine: repeatedly moves an earlier job
/// next to a later job of the same route when another route's job sits
/// between them, scanning from the back. The result has each route's jobs
/// contiguous and no route departs later.
std::vector<int> gather_machine_jobs(const std::vector<int>& jobs, const std::vector<int>& route_of);

/// Applies gather_machine_jobs to every depot machine.
CpSolution gather_jobs(const Instance& inst, const CpSolution& sol);

}  // namespace mopvrp
