#pragma once

// Insertion machinery shared by construction and repair.

#include <algorithm>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "mopvrp/delay_profile.hpp"
#include "mopvrp/model.hpp"

namespace mopvrp {

struct InsertionCandidate {
  int customer = 0;
  int route = -1;
  int position = -1;  // index in the route the customer is inserted at
  int machine = -1;   // MoP: machine on the vehicle; CP: depot machine
  // CP only: index into the machine's job list. MoP production order follows
  // the route, so the slot is implied.
  int prod_position = -1;
  // CP only: the route's jobs before prod_position move along with the new job.
  bool relocate_group = false;
  double delta_travel = 0.0;
  double delta_delay = 0.0;
  double delta_total = 0.0;
  // Capacity plus duration excess; nonzero only for forced insertions.
  double violation = 0.0;
};

void apply_insertion(MopSolution& sol, const InsertionCandidate& cand);
void apply_insertion(CpSolution& sol, const InsertionCandidate& cand);

/// Removes a routed customer and its production job. Empty routes stay.
void remove_customer(MopSolution& sol, int customer);
void remove_customer(CpSolution& sol, int customer);

// ---------------------------------------------------------------- MoP

struct RouteCost {
  double travel = 0.0;
  double delay = 0.0;
  double ret = 0.0;  // return time to the depot
  double load = 0.0;
};

/// Cost of one MoP route under in-line production, optionally as if `skip`
/// were not on it.
RouteCost mop_route_cost(const Instance& inst, std::span<const int> route,
                         const std::vector<int>& machine_of, int skip = 0);

/// Best feasible (route position, machine) for customer i in route r.
std::optional<InsertionCandidate> mop_best_in_route(const Instance& inst, const MopSolution& sol,
                                                    int customer, int route);

/// Best feasible insertion over all routes, positions and machines. Ties go to
/// the lowest (route, position, machine).
std::optional<InsertionCandidate> mop_best_insertion(const Instance& inst, const MopSolution& sol,
                                                     int customer);

// ---------------------------------------------------------------- CP

/// A production slot on one depot machine.
struct ProductionSlot {
  int position = 0;
  bool relocate_group = false;

  bool operator==(const ProductionSlot&) const = default;
};

/// Production positions worth trying for a job of route r on a machine whose
/// jobs carry the given route tags. Route absent: every group boundary. Route
/// present: the start of its group, and each later boundary both as a plain
/// insertion and with the route's group relocated there.
std::vector<ProductionSlot> cp_candidate_positions(std::span<const int> route_tags, int route);

/// Derived state of a CP solution reused across many candidate evaluations.
struct CpContext {
  const Instance* inst = nullptr;
  Timeline timeline;
  std::vector<DelayProfile> profiles;            // per route
  std::vector<std::vector<int>> job_tags;        // per machine, route of each job
  std::vector<std::vector<double>> ready;        // [machine][route], -inf if none
  std::vector<std::vector<double>> ready_other;  // [machine][route], max over other machines

  static CpContext build(const Instance& inst, const CpSolution& sol);
};

/// Full scan over route positions, machines and production slots.
std::optional<InsertionCandidate> cp_integrated_insertion(const Instance& inst,
                                                          const CpSolution& sol, int customer);
std::optional<InsertionCandidate> cp_integrated_insertion(const CpContext& ctx,
                                                          const CpSolution& sol, int customer);

/// Route position first, assuming departures stay put; production slot second.
std::optional<InsertionCandidate> cp_decomposed_insertion(const Instance& inst,
                                                          const CpSolution& sol, int customer);
std::optional<InsertionCandidate> cp_decomposed_insertion(const CpContext& ctx,
                                                          const CpSolution& sol, int customer);

/// Up to k routes ranked by the fixed-departure increment, each completed with
/// its best production slot, sorted by total increment.
std::vector<InsertionCandidate> cp_k_best_routes(const Instance& inst, const CpSolution& sol,
                                                 int customer, int k);
std::vector<InsertionCandidate> cp_k_best_routes(const CpContext& ctx, const CpSolution& sol,
                                                 int customer, int k);

// ---------------------------------------------------------------- shared

/// Least-violation insertion (ties by increment) for customers that have no
/// feasible slot left.
InsertionCandidate forced_insertion(const Instance& inst, const MopSolution& sol, int customer);
InsertionCandidate forced_insertion(const Instance& inst, const CpSolution& sol, int customer);

/// Uniform perturbation of candidate costs, floored at zero.
struct CostNoise {
  std::mt19937_64* rng = nullptr;
  double amplitude = 0.0;

  double operator()(double cost) {
    std::uniform_real_distribution<double> u(-amplitude, amplitude);
    return std::max(0.0, cost + u(*rng));
  }
};

inline constexpr double kMissingRoutePenalty = 1e7;

struct InsertionOutcome {
  std::vector<int> forced;  // customers placed by forced_insertion
};

/// Regret-k insertion of every pending customer: repeatedly inserts the
/// customer whose k best routes differ most from its best one (ties: lowest
/// best cost, then lowest id).
InsertionOutcome regret_insert(const Instance& inst, MopSolution& sol, std::vector<int> pending,
                               int k, CostNoise* noise = nullptr);
InsertionOutcome regret_insert(const Instance& inst, CpSolution& sol, std::vector<int> pending,
                               int k, CostNoise* noise = nullptr);

template <class Solution>
struct Construction {
  Solution solution;
  std::vector<int> forced;
};

/// Parallel insertion from kappa empty routes: the customer with the smallest
/// minimum insertion cost goes in first.
Construction<MopSolution> parallel_construct_mop(const Instance& inst);
Construction<CpSolution> parallel_construct_cp(const Instance& inst);

struct FleetSize {
  int vehicles = 0;
  std::vector<int> unroutable;  // customers infeasible even on their own
};

/// Greedy sequential insertion under capacity and duration (MoP timing with
/// the instance's machines per vehicle); the route count bounds the fleet.
FleetSize fleet_size(const Instance& inst);

}  // namespace mopvrp
