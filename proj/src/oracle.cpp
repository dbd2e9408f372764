#include "mopvrp/oracle.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace mopvrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void guard_size(const Instance& inst) {
  if (inst.num_customers() > kOracleMaxCustomers || inst.num_vehicles > kOracleMaxVehicles ||
      inst.machines_per_vehicle > kOracleMaxMachines) {
    throw OracleSizeError("brute-force oracle is limited to n <= " +
                          std::to_string(kOracleMaxCustomers) + ", vehicles <= " +
                          std::to_string(kOracleMaxVehicles) + ", machines per vehicle <= " +
                          std::to_string(kOracleMaxMachines) + " (got n = " +
                          std::to_string(inst.num_customers()) + ", vehicles = " +
                          std::to_string(inst.num_vehicles) + ", machines = " +
                          std::to_string(inst.machines_per_vehicle) + ")");
  }
}

std::size_t idx(int v) { return static_cast<std::size_t>(v); }

// Lowest-cost way to cover `mask` with at most `routes` blocks, given the best
// cost of every single block. choice[j][mask] is the block holding the lowest
// customer, or 0 when fewer routes are used.
struct Partition {
  std::vector<unsigned> blocks;
  double cost = kInf;
};

Partition combine_blocks(const std::vector<double>& block_cost, int n, int routes) {
  const unsigned full = (1u << n) - 1;
  const std::size_t size = std::size_t{1} << n;
  std::vector<std::vector<double>> f(idx(routes) + 1, std::vector<double>(size, kInf));
  std::vector<std::vector<unsigned>> choice(idx(routes) + 1, std::vector<unsigned>(size, 0));
  f[0][0] = 0.0;
  for (int j = 1; j <= routes; ++j) {
    for (unsigned mask = 0; mask <= full; ++mask) {
      double best = f[idx(j - 1)][mask];
      unsigned pick = 0;
      if (mask != 0) {
        const unsigned low = mask & (~mask + 1);
        for (unsigned sub = mask; sub != 0; sub = (sub - 1) & mask) {
          if (!(sub & low) || block_cost[sub] == kInf) continue;
          const double rest = f[idx(j - 1)][mask ^ sub];
          if (rest == kInf) continue;
          const double total = block_cost[sub] + rest;
          if (total < best) {
            best = total;
            pick = sub;
          }
        }
      }
      f[idx(j)][mask] = best;
      choice[idx(j)][mask] = pick;
    }
  }
  Partition out;
  out.cost = f[idx(routes)][full];
  if (out.cost == kInf) return out;
  unsigned mask = full;
  for (int j = routes; j >= 1 && mask != 0; --j) {
    const unsigned sub = choice[idx(j)][mask];
    if (sub == 0) continue;
    out.blocks.push_back(sub);
    mask ^= sub;
  }
  return out;
}

// ------------------------------------------------------------------ MoP

struct MopBlock {
  double cost = kInf;
  std::vector<int> order;
  std::vector<int> machines;
};

class MopRouteSearch {
 public:
  MopRouteSearch(const Instance& inst, std::vector<MopBlock>& best)
      : inst_(inst), best_(best), free_(idx(inst.machines_per_vehicle), 0.0) {}

  void start_with(int c) {
    // Machine labels are canonical: the first job always goes on machine 0.
    step(0u, 0, 0.0, 0.0, 0.0, 0.0, 0, c, 0);
  }

 private:
  void extend(unsigned mask, int last, double clock, double travel, double delay, double load,
              int used) {
    for (int c = 1; c <= inst_.num_customers(); ++c) {
      if (mask & (1u << (c - 1))) continue;
      const int limit = std::min(used, inst_.machines_per_vehicle - 1);
      for (int l = 0; l <= limit; ++l) step(mask, last, clock, travel, delay, load, used, c, l);
    }
  }

  void step(unsigned mask, int last, double clock, double travel, double delay, double load,
            int used, int c, int l) {
    const Customer& cust = inst_.customer(c);
    const double new_load = load + cust.demand;
    if (new_load > inst_.capacity + kTolerance) return;
    const double saved = free_[idx(l)];
    free_[idx(l)] = saved + cust.production_time;
    const double arrival = clock + inst_.time(idx(last), idx(c));
    const double start = std::max(std::max(arrival, cust.tw_start), free_[idx(l)]);
    const double new_delay = delay + std::max(0.0, start - cust.tw_end);
    const double new_travel = travel + inst_.dist(idx(last), idx(c));
    const double new_clock = start + cust.service_time;
    if (new_clock <= inst_.max_duration + kTolerance) {
      const unsigned new_mask = mask | (1u << (c - 1));
      order_.push_back(c);
      machines_.push_back(l);
      if (new_clock + inst_.time(idx(c), 0) <= inst_.max_duration + kTolerance) {
        const double cost = inst_.weights.travel * (new_travel + inst_.dist(idx(c), 0)) +
                            inst_.weights.delay * new_delay;
        MopBlock& slot = best_[new_mask];
        if (cost < slot.cost) slot = MopBlock{cost, order_, machines_};
      }
      extend(new_mask, c, new_clock, new_travel, new_delay, new_load, std::max(used, l + 1));
      order_.pop_back();
      machines_.pop_back();
    }
    free_[idx(l)] = saved;
  }

  const Instance& inst_;
  std::vector<MopBlock>& best_;
  std::vector<double> free_;
  std::vector<int> order_;
  std::vector<int> machines_;
};

}  // namespace

OracleResult<MopSolution> brute_force_mop(const Instance& inst, Execution exec) {
  guard_size(inst);
  const int n = inst.num_customers();
  const std::size_t size = std::size_t{1} << n;

  // One table per first customer; merged in customer order so that serial and
  // parallel runs keep the same tie-breaks.
  std::vector<std::vector<MopBlock>> partial(idx(n), std::vector<MopBlock>(size));
#pragma omp parallel for schedule(dynamic) if (exec == Execution::Parallel)
  for (int first = 1; first <= n; ++first) {
    MopRouteSearch search(inst, partial[idx(first - 1)]);
    search.start_with(first);
  }
  std::vector<MopBlock> best(size);
  for (const auto& table : partial) {
    for (std::size_t mask = 0; mask < size; ++mask) {
      if (table[mask].cost < best[mask].cost) best[mask] = table[mask];
    }
  }

  std::vector<double> block_cost(size);
  for (std::size_t mask = 0; mask < size; ++mask) block_cost[mask] = best[mask].cost;
  const Partition part = combine_blocks(block_cost, n, inst.num_vehicles);

  OracleResult<MopSolution> result;
  result.solution = MopSolution::empty(inst);
  if (n > 0 && part.cost == kInf) return result;
  for (std::size_t r = 0; r < part.blocks.size(); ++r) {
    const MopBlock& block = best[part.blocks[r]];
    result.solution.routes[r] = block.order;
    for (std::size_t k = 0; k < block.order.size(); ++k) {
      result.solution.machine_of[idx(block.order[k])] = block.machines[k];
    }
  }
  result.objective = evaluate_mop(inst, result.solution).objective;
  result.feasible = check_feasibility(inst, result.solution).feasible;
  return result;
}

// ------------------------------------------------------------------ CP

namespace {

struct CpRoute {
  double cost = kInf;
  std::vector<int> order;
};

// Best visiting order of a customer set for a fixed departure.
CpRoute best_order(const Instance& inst, unsigned mask, double departure) {
  std::vector<int> perm;
  double load = 0.0;
  for (int c = 1; c <= inst.num_customers(); ++c) {
    if (mask & (1u << (c - 1))) {
      perm.push_back(c);
      load += inst.customer(c).demand;
    }
  }
  CpRoute best;
  if (load > inst.capacity + kTolerance) return best;
  do {
    double clock = departure;
    double travel = 0.0;
    double delay = 0.0;
    int prev = 0;
    for (int c : perm) {
      const Customer& cust = inst.customer(c);
      const double start = std::max(clock + inst.time(idx(prev), idx(c)), cust.tw_start);
      delay += std::max(0.0, start - cust.tw_end);
      travel += inst.dist(idx(prev), idx(c));
      clock = start + cust.service_time;
      prev = c;
    }
    travel += inst.dist(idx(prev), 0);
    clock += inst.time(idx(prev), 0);
    if (clock > inst.max_duration + kTolerance) continue;
    const double cost = inst.weights.travel * travel + inst.weights.delay * delay;
    if (cost < best.cost) best = CpRoute{cost, perm};
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Restricted growth strings: label[i] <= max(label[0..i-1]) + 1, labels < k.
template <class Fn>
void for_each_labeling(int n, int k, Fn&& fn) {
  std::vector<int> label(idx(n), 0);
  std::vector<int> top(idx(n), 0);  // max label among 0..i
  if (n == 0) {
    fn(label);
    return;
  }
  int i = 0;
  label[0] = 0;
  while (true) {
    if (i == n - 1) {
      fn(label);
    } else {
      ++i;
      label[idx(i)] = 0;
      top[idx(i)] = top[idx(i - 1)];
      continue;
    }
    // advance
    while (i > 0) {
      const int limit = std::min(top[idx(i - 1)] + 1, k - 1);
      if (label[idx(i)] < limit) {
        ++label[idx(i)];
        top[idx(i)] = std::max(top[idx(i - 1)], label[idx(i)]);
        break;
      }
      --i;
    }
    if (i == 0) return;
  }
}

std::vector<std::vector<int>> all_labelings(int n, int k) {
  std::vector<std::vector<int>> out;
  for_each_labeling(n, k, [&](const std::vector<int>& l) { out.push_back(l); });
  return out;
}

struct CpCandidate {
  double cost = kInf;
  std::vector<int> route_label;                    // per customer (index c - 1)
  std::vector<int> job_label;                      // per customer
  std::vector<std::vector<int>> group_order;       // per machine, route labels
};

class CpEvaluator {
 public:
  explicit CpEvaluator(const Instance& inst) : inst_(inst) {}

  // Departure of each route for the given job assignment and group orders,
  // summing production times in the same order the evaluator does.
  std::vector<double> departures(const std::vector<int>& route_label,
                                 const std::vector<int>& job_label,
                                 const std::vector<std::vector<int>>& group_order,
                                 int routes) const {
    std::vector<double> ready(idx(routes), -kInf);
    const int n = inst_.num_customers();
    for (std::size_t l = 0; l < group_order.size(); ++l) {
      double clock = -inst_.early_production;
      for (int g : group_order[l]) {
        for (int c = 1; c <= n; ++c) {
          if (job_label[idx(c - 1)] != static_cast<int>(l) || route_label[idx(c - 1)] != g) continue;
          clock += inst_.customer(c).production_time;
          ready[idx(g)] = std::max(ready[idx(g)], clock);
        }
      }
    }
    for (double& r : ready) r = std::max(0.0, r);
    return ready;
  }

  const CpRoute& route(unsigned mask, double departure) {
    auto key = std::make_pair(mask, departure);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, best_order(inst_, mask, departure)).first;
    return it->second;
  }

 private:
  const Instance& inst_;
  std::map<std::pair<unsigned, double>, CpRoute> cache_;
};

// Enumerates group orders on every machine (odometer over permutations).
template <class Fn>
void for_each_group_order(std::vector<std::vector<int>> groups, Fn&& fn) {
  for (auto& g : groups) std::sort(g.begin(), g.end());
  while (true) {
    fn(groups);
    std::size_t l = 0;
    for (; l < groups.size(); ++l) {
      if (std::next_permutation(groups[l].begin(), groups[l].end())) break;
    }
    if (l == groups.size()) return;
  }
}

CpCandidate best_for_route_partition(const Instance& inst, const std::vector<int>& route_label,
                                     const std::vector<std::vector<int>>& job_labelings,
                                     CpEvaluator& eval) {
  const int n = inst.num_customers();
  int routes = 0;
  for (int r : route_label) routes = std::max(routes, r + 1);
  std::vector<unsigned> masks(idx(routes), 0u);
  for (int c = 1; c <= n; ++c) masks[idx(route_label[idx(c - 1)])] |= 1u << (c - 1);

  CpCandidate best;
  for (const auto& job_label : job_labelings) {
    int machines = 0;
    for (int l : job_label) machines = std::max(machines, l + 1);
    std::vector<std::vector<int>> groups(idx(machines));
    for (int c = 1; c <= n; ++c) {
      auto& g = groups[idx(job_label[idx(c - 1)])];
      const int r = route_label[idx(c - 1)];
      if (std::find(g.begin(), g.end(), r) == g.end()) g.push_back(r);
    }
    for_each_group_order(groups, [&](const std::vector<std::vector<int>>& order) {
      const auto dep = eval.departures(route_label, job_label, order, routes);
      double total = 0.0;
      for (int r = 0; r < routes && total < kInf; ++r) {
        total += eval.route(masks[idx(r)], dep[idx(r)]).cost;
      }
      if (total < best.cost) best = CpCandidate{total, route_label, job_label, order};
    });
  }
  return best;
}

CpSolution materialize(const Instance& inst, const CpCandidate& cand, CpEvaluator& eval) {
  const int n = inst.num_customers();
  CpSolution sol = CpSolution::empty(inst);
  int routes = 0;
  for (int r : cand.route_label) routes = std::max(routes, r + 1);
  std::vector<unsigned> masks(idx(routes), 0u);
  for (int c = 1; c <= n; ++c) masks[idx(cand.route_label[idx(c - 1)])] |= 1u << (c - 1);
  const auto dep = eval.departures(cand.route_label, cand.job_label, cand.group_order, routes);
  for (int r = 0; r < routes; ++r) sol.routes[idx(r)] = eval.route(masks[idx(r)], dep[idx(r)]).order;
  for (std::size_t l = 0; l < cand.group_order.size(); ++l) {
    for (int g : cand.group_order[l]) {
      for (int c = 1; c <= n; ++c) {
        if (cand.job_label[idx(c - 1)] == static_cast<int>(l) && cand.route_label[idx(c - 1)] == g) {
          sol.machine_jobs[l].push_back(c);
        }
      }
    }
  }
  return sol;
}

OracleResult<CpSolution> finish_cp(const Instance& inst, CpSolution sol) {
  OracleResult<CpSolution> result;
  result.objective = evaluate_cp(inst, sol).objective;
  result.feasible = check_feasibility(inst, sol).feasible;
  result.solution = std::move(sol);
  return result;
}

// One vehicle: its departure only depends on the makespan, so minimize that
// first and route afterwards.
OracleResult<CpSolution> single_vehicle_cp(const Instance& inst) {
  const int n = inst.num_customers();
  const std::vector<int> one_route(idx(n), 0);
  CpCandidate best_schedule;
  double best_makespan = kInf;
  CpEvaluator eval(inst);
  for_each_labeling(n, inst.num_depot_machines(), [&](const std::vector<int>& job_label) {
    int machines = 0;
    for (int l : job_label) machines = std::max(machines, l + 1);
    std::vector<std::vector<int>> order(idx(machines), std::vector<int>{0});
    const double dep = eval.departures(one_route, job_label, order, 1)[0];
    if (dep < best_makespan) {
      best_makespan = dep;
      best_schedule = CpCandidate{0.0, one_route, job_label, order};
    }
  });
  const unsigned full = (1u << n) - 1;
  if (eval.route(full, best_makespan).cost == kInf) return {};
  return finish_cp(inst, materialize(inst, best_schedule, eval));
}

}  // namespace

OracleResult<CpSolution> brute_force_cp(const Instance& inst, CpOracleOptions options) {
  guard_size(inst);
  const int n = inst.num_customers();
  if (n == 0) return finish_cp(inst, CpSolution::empty(inst));
  if (inst.num_vehicles == 1 && options.single_vehicle_shortcut) return single_vehicle_cp(inst);

  const auto route_labelings = all_labelings(n, inst.num_vehicles);
  const auto job_labelings = all_labelings(n, inst.num_depot_machines());
  std::vector<CpCandidate> per_partition(route_labelings.size());

#pragma omp parallel if (options.exec == Execution::Parallel)
  {
    CpEvaluator eval(inst);
#pragma omp for schedule(dynamic)
    for (std::size_t p = 0; p < route_labelings.size(); ++p) {
      per_partition[p] = best_for_route_partition(inst, route_labelings[p], job_labelings, eval);
    }
  }

  const CpCandidate* best = nullptr;
  for (const auto& cand : per_partition) {
    if (cand.cost < kInf && (!best || cand.cost < best->cost)) best = &cand;
  }
  if (!best) return {};
  CpEvaluator eval(inst);
  return finish_cp(inst, materialize(inst, *best, eval));
}

}  // namespace mopvrp
