#include "mopvrp/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mopvrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double excess(double value, double limit) {
  return value > limit + kTolerance ? value - limit : 0.0;
}

double travel_increment(const Instance& inst, const Route& route, int pos, int customer) {
  const auto prev = static_cast<std::size_t>(pos == 0 ? 0 : route[static_cast<std::size_t>(pos) - 1]);
  const auto next = static_cast<std::size_t>(
      pos == static_cast<int>(route.size()) ? 0 : route[static_cast<std::size_t>(pos)]);
  const auto c = static_cast<std::size_t>(customer);
  return inst.dist(prev, c) + inst.dist(c, next) - inst.dist(prev, next);
}

// Candidate order: feasible-first by violation when forcing, then increment.
// Earlier candidates win ties, so scanning order encodes the tie-break.
bool better(const InsertionCandidate& a, const InsertionCandidate& b, bool by_violation) {
  if (by_violation) {
    if (a.violation < b.violation - kTolerance) return true;
    if (a.violation > b.violation + kTolerance) return false;
  }
  return a.delta_total < b.delta_total - kTolerance;
}

// ------------------------------------------------------------------ MoP

RouteCost mop_route_cost(const Instance& inst, std::span<const int> custs,
                         std::span<const int> machines, std::vector<double>& machine_free) {
  std::fill(machine_free.begin(), machine_free.end(), 0.0);
  RouteCost rc;
  double clock = 0.0;
  std::size_t prev = 0;
  for (std::size_t k = 0; k < custs.size(); ++k) {
    const auto c = static_cast<std::size_t>(custs[k]);
    const Customer& cust = inst.customers[c - 1];
    double& free_at = machine_free[static_cast<std::size_t>(machines[k])];
    free_at += cust.production_time;
    const double start = std::max(std::max(clock + inst.time(prev, c), cust.tw_start), free_at);
    rc.delay += std::max(0.0, start - cust.tw_end);
    rc.travel += inst.dist(prev, c);
    rc.load += cust.demand;
    clock = start + cust.service_time;
    prev = c;
  }
  if (!custs.empty()) {
    rc.travel += inst.dist(prev, 0);
    clock += inst.time(prev, 0);
  }
  rc.ret = clock;
  return rc;
}

// With noise, every (position, machine) candidate is ranked by its perturbed
// increment, and *ranked receives the winner's perturbed value.
std::optional<InsertionCandidate> mop_scan_route(const Instance& inst, const MopSolution& sol,
                                                 int customer, int r, bool forced,
                                                 CostNoise* noise = nullptr,
                                                 double* ranked = nullptr) {
  const Route& route = sol.routes[static_cast<std::size_t>(r)];
  const int m = inst.machines_per_vehicle;
  const std::size_t len = route.size();
  std::vector<double> machine_free(static_cast<std::size_t>(m));
  std::vector<int> machines(len);
  std::vector<char> used(static_cast<std::size_t>(m), 0);
  for (std::size_t k = 0; k < len; ++k) {
    machines[k] = sol.machine_of[static_cast<std::size_t>(route[k])];
    used[static_cast<std::size_t>(machines[k])] = 1;
  }
  const RouteCost base = mop_route_cost(inst, route, machines, machine_free);
  const Customer& cust = inst.customer(customer);
  const double cap_excess = excess(base.load + cust.demand, inst.capacity);
  if (!forced && cap_excess > 0.0) return std::nullopt;

  // Idle machines are interchangeable; only the first one is tried.
  std::vector<int> machine_options;
  bool idle_tried = false;
  for (int l = 0; l < m; ++l) {
    if (!used[static_cast<std::size_t>(l)]) {
      if (idle_tried) continue;
      idle_tried = true;
    }
    machine_options.push_back(l);
  }

  std::vector<int> custs(len + 1);
  std::vector<int> mach(len + 1);
  std::optional<InsertionCandidate> best;
  double best_rank = 0.0;
  for (std::size_t pos = 0; pos <= len; ++pos) {
    std::copy(route.begin(), route.begin() + static_cast<std::ptrdiff_t>(pos), custs.begin());
    std::copy(machines.begin(), machines.begin() + static_cast<std::ptrdiff_t>(pos), mach.begin());
    custs[pos] = customer;
    std::copy(route.begin() + static_cast<std::ptrdiff_t>(pos), route.end(),
              custs.begin() + static_cast<std::ptrdiff_t>(pos) + 1);
    std::copy(machines.begin() + static_cast<std::ptrdiff_t>(pos), machines.end(),
              mach.begin() + static_cast<std::ptrdiff_t>(pos) + 1);
    const double dtravel = travel_increment(inst, route, static_cast<int>(pos), customer);
    for (int l : machine_options) {
      mach[pos] = l;
      const RouteCost rc = mop_route_cost(inst, custs, mach, machine_free);
      InsertionCandidate cand;
      cand.customer = customer;
      cand.route = r;
      cand.position = static_cast<int>(pos);
      cand.machine = l;
      cand.delta_travel = dtravel;
      cand.delta_delay = rc.delay - base.delay;
      cand.delta_total = inst.weights.travel * dtravel + inst.weights.delay * cand.delta_delay;
      cand.violation = cap_excess + excess(rc.ret, inst.max_duration);
      if (!forced && cand.violation > 0.0) continue;
      if (noise) {
        const double rank = (*noise)(cand.delta_total);
        if (!best || rank < best_rank - kTolerance) {
          best = cand;
          best_rank = rank;
        }
      } else if (!best || better(cand, *best, forced)) {
        best = cand;
        best_rank = cand.delta_total;
      }
    }
  }
  if (ranked) *ranked = best_rank;
  return best;
}

// One candidate per route; empty routes share the result of the first one.
struct RankedCandidate {
  std::optional<InsertionCandidate> cand;
  double rank = 0.0;  // increment, perturbed when noise is on
};

RankedCandidate mop_ranked_in_route(const Instance& inst, const MopSolution& sol, int customer,
                                    int r, CostNoise* noise) {
  RankedCandidate out;
  out.cand = mop_scan_route(inst, sol, customer, r, false, noise, &out.rank);
  return out;
}

std::vector<RankedCandidate> mop_per_route(const Instance& inst, const MopSolution& sol,
                                           int customer, CostNoise* noise) {
  std::vector<RankedCandidate> out(sol.routes.size());
  int first_empty = -1;
  for (std::size_t r = 0; r < sol.routes.size(); ++r) {
    if (sol.routes[r].empty()) {
      if (first_empty >= 0) {
        out[r] = out[static_cast<std::size_t>(first_empty)];
        if (out[r].cand) out[r].cand->route = static_cast<int>(r);
        continue;
      }
      first_empty = static_cast<int>(r);
    }
    out[r] = mop_ranked_in_route(inst, sol, customer, static_cast<int>(r), noise);
  }
  return out;
}

// ------------------------------------------------------------------ CP

struct SlotScratch {
  std::vector<double> new_ready;
  std::vector<int> touched;
};

struct SlotResult {
  double delta_delay = 0.0;
  double violation = 0.0;
};

// Whole-solution delay change of putting the customer's job (route r, already
// inserted into the route whose profile is `overlay`) into a slot of machine l.
SlotResult eval_slot(const CpContext& ctx, const CpSolution& sol, int customer, int r,
                     const DelayProfile& overlay, int l, const ProductionSlot& slot,
                     SlotScratch& s) {
  const Instance& inst = *ctx.inst;
  const auto& jobs = sol.machine_jobs[static_cast<std::size_t>(l)];
  const auto& tags = ctx.job_tags[static_cast<std::size_t>(l)];
  double clock = -inst.early_production;
  auto run = [&](int c, int tag) {
    clock += inst.customers[static_cast<std::size_t>(c) - 1].production_time;
    double& nr = s.new_ready[static_cast<std::size_t>(tag)];
    if (nr == -kInf) s.touched.push_back(tag);
    nr = std::max(nr, clock);
  };
  const auto pos = static_cast<std::size_t>(slot.position);
  if (slot.relocate_group) {
    for (std::size_t k = 0; k < pos; ++k) {
      if (tags[k] != r) run(jobs[k], tags[k]);
    }
    for (std::size_t k = 0; k < pos; ++k) {
      if (tags[k] == r) run(jobs[k], r);
    }
  } else {
    for (std::size_t k = 0; k < pos; ++k) run(jobs[k], tags[k]);
  }
  run(customer, r);
  for (std::size_t k = pos; k < jobs.size(); ++k) run(jobs[k], tags[k]);

  SlotResult res;
  const auto& other = ctx.ready_other[static_cast<std::size_t>(l)];
  for (int k : s.touched) {
    const auto ku = static_cast<std::size_t>(k);
    const double old_dep = ctx.timeline.route_departure[ku];
    const double new_dep = std::max({0.0, other[ku], s.new_ready[ku]});
    const DelayProfile& before = ctx.profiles[ku];
    const DelayProfile& after = k == r ? overlay : before;
    if (k == r || new_dep != old_dep) {
      res.delta_delay += after.value_at(new_dep) - before.value_at(old_dep);
    }
    if (k == r || new_dep > old_dep + kTolerance) {
      res.violation += excess(after.return_time(new_dep), inst.max_duration);
    }
    s.new_ready[ku] = -kInf;
  }
  s.touched.clear();
  return res;
}

// Best production placement for a fixed route insertion.
std::optional<InsertionCandidate> best_production(const CpContext& ctx, const CpSolution& sol,
                                                  int customer, int r, int position,
                                                  const DelayProfile& overlay, double dtravel,
                                                  double cap_excess, bool forced) {
  const Instance& inst = *ctx.inst;
  SlotScratch scratch;
  scratch.new_ready.assign(sol.routes.size(), -kInf);
  std::optional<InsertionCandidate> best;
  bool idle_tried = false;
  for (std::size_t l = 0; l < sol.machine_jobs.size(); ++l) {
    if (sol.machine_jobs[l].empty()) {
      if (idle_tried) continue;
      idle_tried = true;
    }
    for (const ProductionSlot& slot : cp_candidate_positions(ctx.job_tags[l], r)) {
      const SlotResult res =
          eval_slot(ctx, sol, customer, r, overlay, static_cast<int>(l), slot, scratch);
      InsertionCandidate cand;
      cand.customer = customer;
      cand.route = r;
      cand.position = position;
      cand.machine = static_cast<int>(l);
      cand.prod_position = slot.position;
      cand.relocate_group = slot.relocate_group;
      cand.delta_travel = dtravel;
      cand.delta_delay = res.delta_delay;
      cand.delta_total = inst.weights.travel * dtravel + inst.weights.delay * res.delta_delay;
      cand.violation = cap_excess + res.violation;
      if (!forced && cand.violation > 0.0) continue;
      if (!best || better(cand, *best, forced)) best = cand;
    }
  }
  return best;
}

Route with_insertion(const Route& route, int pos, int customer) {
  Route out;
  out.reserve(route.size() + 1);
  out.insert(out.end(), route.begin(), route.begin() + pos);
  out.push_back(customer);
  out.insert(out.end(), route.begin() + pos, route.end());
  return out;
}

std::optional<InsertionCandidate> cp_scan(const CpContext& ctx, const CpSolution& sol,
                                          int customer, bool forced) {
  const Instance& inst = *ctx.inst;
  const double demand = inst.customer(customer).demand;
  std::optional<InsertionCandidate> best;
  bool empty_tried = false;
  for (std::size_t r = 0; r < sol.routes.size(); ++r) {
    const Route& route = sol.routes[r];
    if (route.empty()) {
      if (empty_tried) continue;
      empty_tried = true;
    }
    const double cap_excess = excess(ctx.timeline.route_load[r] + demand, inst.capacity);
    if (!forced && cap_excess > 0.0) continue;
    for (int pos = 0; pos <= static_cast<int>(route.size()); ++pos) {
      const Route trial = with_insertion(route, pos, customer);
      const DelayProfile overlay = DelayProfile::build(inst, trial);
      const double dtravel = travel_increment(inst, route, pos, customer);
      auto cand = best_production(ctx, sol, customer, static_cast<int>(r), pos, overlay, dtravel,
                                  cap_excess, forced);
      if (cand && (!best || better(*cand, *best, forced))) best = cand;
    }
  }
  return best;
}

struct FixedDeparturePick {
  int route = -1;
  int position = -1;
  double dtravel = 0.0;
  double cost = 0.0;
  DelayProfile overlay;
};

// Best route position assuming the route keeps its current departure.
std::optional<FixedDeparturePick> fixed_departure_best(const CpContext& ctx, const CpSolution& sol,
                                                       int customer, int r) {
  const Instance& inst = *ctx.inst;
  const auto ru = static_cast<std::size_t>(r);
  const Route& route = sol.routes[ru];
  if (excess(ctx.timeline.route_load[ru] + inst.customer(customer).demand, inst.capacity) > 0.0) {
    return std::nullopt;
  }
  const double dep = ctx.timeline.route_departure[ru];
  const double before = ctx.profiles[ru].value_at(dep);
  std::optional<FixedDeparturePick> best;
  for (int pos = 0; pos <= static_cast<int>(route.size()); ++pos) {
    DelayProfile overlay = DelayProfile::build(inst, with_insertion(route, pos, customer));
    if (!overlay.feasible(dep)) continue;
    const double dtravel = travel_increment(inst, route, pos, customer);
    const double cost =
        inst.weights.travel * dtravel + inst.weights.delay * (overlay.value_at(dep) - before);
    if (!best || cost < best->cost - kTolerance) {
      best = FixedDeparturePick{r, pos, dtravel, cost, std::move(overlay)};
    }
  }
  return best;
}

}  // namespace

// ------------------------------------------------------------------ public

RouteCost mop_route_cost(const Instance& inst, std::span<const int> route,
                         const std::vector<int>& machine_of, int skip) {
  std::vector<int> custs;
  std::vector<int> machines;
  custs.reserve(route.size());
  machines.reserve(route.size());
  for (int c : route) {
    if (c == skip) continue;
    custs.push_back(c);
    machines.push_back(machine_of[static_cast<std::size_t>(c)]);
  }
  std::vector<double> machine_free(static_cast<std::size_t>(inst.machines_per_vehicle));
  return mop_route_cost(inst, custs, machines, machine_free);
}

void apply_insertion(MopSolution& sol, const InsertionCandidate& cand) {
  Route& route = sol.routes[static_cast<std::size_t>(cand.route)];
  route.insert(route.begin() + cand.position, cand.customer);
  sol.machine_of[static_cast<std::size_t>(cand.customer)] = cand.machine;
}

void apply_insertion(CpSolution& sol, const InsertionCandidate& cand) {
  Route& route = sol.routes[static_cast<std::size_t>(cand.route)];
  auto& jobs = sol.machine_jobs[static_cast<std::size_t>(cand.machine)];
  const auto pos = static_cast<std::size_t>(cand.prod_position);
  std::vector<int> updated;
  updated.reserve(jobs.size() + 1);
  if (cand.relocate_group) {
    auto in_route = [&](int c) { return std::find(route.begin(), route.end(), c) != route.end(); };
    std::vector<int> moved;
    for (std::size_t k = 0; k < pos; ++k) {
      (in_route(jobs[k]) ? moved : updated).push_back(jobs[k]);
    }
    updated.insert(updated.end(), moved.begin(), moved.end());
  } else {
    updated.insert(updated.end(), jobs.begin(), jobs.begin() + static_cast<std::ptrdiff_t>(pos));
  }
  updated.push_back(cand.customer);
  updated.insert(updated.end(), jobs.begin() + static_cast<std::ptrdiff_t>(pos), jobs.end());
  jobs = std::move(updated);
  route.insert(route.begin() + cand.position, cand.customer);
}

namespace {
bool erase_from(std::vector<int>& v, int value) {
  auto it = std::find(v.begin(), v.end(), value);
  if (it == v.end()) return false;
  v.erase(it);
  return true;
}
}  // namespace

void remove_customer(MopSolution& sol, int customer) {
  for (auto& route : sol.routes) {
    if (erase_from(route, customer)) break;
  }
  sol.machine_of[static_cast<std::size_t>(customer)] = -1;
}

void remove_customer(CpSolution& sol, int customer) {
  for (auto& route : sol.routes) {
    if (erase_from(route, customer)) break;
  }
  for (auto& jobs : sol.machine_jobs) {
    if (erase_from(jobs, customer)) break;
  }
}

std::optional<InsertionCandidate> mop_best_in_route(const Instance& inst, const MopSolution& sol,
                                                    int customer, int route) {
  return mop_scan_route(inst, sol, customer, route, false);
}

std::optional<InsertionCandidate> mop_best_insertion(const Instance& inst, const MopSolution& sol,
                                                     int customer) {
  std::optional<InsertionCandidate> best;
  bool empty_tried = false;
  for (std::size_t r = 0; r < sol.routes.size(); ++r) {
    if (sol.routes[r].empty()) {
      if (empty_tried) continue;
      empty_tried = true;
    }
    auto cand = mop_scan_route(inst, sol, customer, static_cast<int>(r), false);
    if (cand && (!best || better(*cand, *best, false))) best = cand;
  }
  return best;
}

std::vector<ProductionSlot> cp_candidate_positions(std::span<const int> tags, int route) {
  const int len = static_cast<int>(tags.size());
  auto boundary = [&](int b) { return b == 0 || b == len || tags[b] != tags[b - 1]; };
  std::vector<ProductionSlot> out;
  const auto first = std::find(tags.begin(), tags.end(), route);
  if (first == tags.end()) {
    for (int b = 0; b <= len; ++b) {
      if (boundary(b)) out.push_back({b, false});
    }
    return out;
  }
  const int first_idx = static_cast<int>(first - tags.begin());
  const int last_idx =
      len - 1 - static_cast<int>(std::find(tags.rbegin(), tags.rend(), route) - tags.rbegin());
  out.push_back({first_idx, false});
  for (int b = last_idx + 2; b <= len; ++b) {
    if (!boundary(b)) continue;
    out.push_back({b, true});
    out.push_back({b, false});
  }
  return out;
}

CpContext CpContext::build(const Instance& inst, const CpSolution& sol) {
  CpContext ctx;
  ctx.inst = &inst;
  ctx.timeline = evaluate_cp(inst, sol, Coverage::Partial);
  const std::size_t routes = sol.routes.size();
  const std::size_t machines = sol.machine_jobs.size();
  ctx.profiles.reserve(routes);
  for (const auto& route : sol.routes) ctx.profiles.push_back(DelayProfile::build(inst, route));

  ctx.job_tags.resize(machines);
  ctx.ready.assign(machines, std::vector<double>(routes, -kInf));
  for (std::size_t l = 0; l < machines; ++l) {
    for (int c : sol.machine_jobs[l]) {
      const int r = ctx.timeline.route_of[static_cast<std::size_t>(c)];
      ctx.job_tags[l].push_back(r);
      double& rd = ctx.ready[l][static_cast<std::size_t>(r)];
      rd = std::max(rd, ctx.timeline.prod_end[static_cast<std::size_t>(c)]);
    }
  }
  // Max over the other machines, from the top two values per route.
  ctx.ready_other.assign(machines, std::vector<double>(routes, -kInf));
  for (std::size_t r = 0; r < routes; ++r) {
    double top = -kInf;
    double second = -kInf;
    std::size_t top_machine = machines;
    for (std::size_t l = 0; l < machines; ++l) {
      const double v = ctx.ready[l][r];
      if (v > top) {
        second = top;
        top = v;
        top_machine = l;
      } else if (v > second) {
        second = v;
      }
    }
    for (std::size_t l = 0; l < machines; ++l) ctx.ready_other[l][r] = l == top_machine ? second : top;
  }
  return ctx;
}

std::optional<InsertionCandidate> cp_integrated_insertion(const CpContext& ctx,
                                                          const CpSolution& sol, int customer) {
  return cp_scan(ctx, sol, customer, false);
}

std::optional<InsertionCandidate> cp_integrated_insertion(const Instance& inst,
                                                          const CpSolution& sol, int customer) {
  return cp_integrated_insertion(CpContext::build(inst, sol), sol, customer);
}

std::vector<InsertionCandidate> cp_k_best_routes(const CpContext& ctx, const CpSolution& sol,
                                                 int customer, int k) {
  const Instance& inst = *ctx.inst;
  std::vector<FixedDeparturePick> picks;
  int first_empty = -1;
  for (std::size_t r = 0; r < sol.routes.size(); ++r) {
    const int ri = static_cast<int>(r);
    if (sol.routes[r].empty() && first_empty >= 0) {
      // Same departure (0) and profile as the first empty route.
      for (const auto& p : picks) {
        if (p.route == first_empty) {
          picks.push_back(p);
          picks.back().route = ri;
        }
      }
      continue;
    }
    if (sol.routes[r].empty()) first_empty = ri;
    if (auto p = fixed_departure_best(ctx, sol, customer, ri)) picks.push_back(std::move(*p));
  }
  std::stable_sort(picks.begin(), picks.end(),
                   [](const FixedDeparturePick& a, const FixedDeparturePick& b) {
                     return a.cost < b.cost;
                   });

  std::vector<InsertionCandidate> out;
  for (const auto& p : picks) {
    if (static_cast<int>(out.size()) >= k) break;
    auto cand = best_production(ctx, sol, customer, p.route, p.position, p.overlay, p.dtravel,
                                0.0, false);
    if (cand) out.push_back(*cand);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const InsertionCandidate& a, const InsertionCandidate& b) {
                     return a.delta_total < b.delta_total;
                   });
  (void)inst;
  return out;
}

std::vector<InsertionCandidate> cp_k_best_routes(const Instance& inst, const CpSolution& sol,
                                                 int customer, int k) {
  return cp_k_best_routes(CpContext::build(inst, sol), sol, customer, k);
}

std::optional<InsertionCandidate> cp_decomposed_insertion(const CpContext& ctx,
                                                          const CpSolution& sol, int customer) {
  auto best = cp_k_best_routes(ctx, sol, customer, 1);
  if (best.empty()) return std::nullopt;
  return best.front();
}

std::optional<InsertionCandidate> cp_decomposed_insertion(const Instance& inst,
                                                          const CpSolution& sol, int customer) {
  return cp_decomposed_insertion(CpContext::build(inst, sol), sol, customer);
}

InsertionCandidate forced_insertion(const Instance& inst, const MopSolution& sol, int customer) {
  std::optional<InsertionCandidate> best;
  for (std::size_t r = 0; r < sol.routes.size(); ++r) {
    auto cand = mop_scan_route(inst, sol, customer, static_cast<int>(r), true);
    if (cand && (!best || better(*cand, *best, true))) best = cand;
  }
  return *best;
}

InsertionCandidate forced_insertion(const Instance& inst, const CpSolution& sol, int customer) {
  return *cp_scan(CpContext::build(inst, sol), sol, customer, true);
}

// ------------------------------------------------------------------ regret

namespace {

struct Option {
  double cost;
  InsertionCandidate cand;
};

struct Selection {
  std::size_t index = 0;  // into pending
  InsertionCandidate cand;
  double regret = -1.0;
  double best_cost = 0.0;
  bool found = false;
};

// Ranks one customer's options and offers it to the running selection.
void consider(std::vector<Option>& options, std::size_t pending_index, int k,
              Selection& selection) {
  if (options.empty()) return;
  std::stable_sort(options.begin(), options.end(),
                   [](const Option& a, const Option& b) { return a.cost < b.cost; });
  double regret = 0.0;
  for (int h = 1; h < k; ++h) {
    regret += h < static_cast<int>(options.size())
                  ? options[static_cast<std::size_t>(h)].cost - options.front().cost
                  : kMissingRoutePenalty;
  }
  const double best_cost = options.front().cost;
  const bool wins = !selection.found || regret > selection.regret + kTolerance ||
                    (regret >= selection.regret - kTolerance &&
                     best_cost < selection.best_cost - kTolerance);
  if (wins) {
    selection = Selection{pending_index, options.front().cand, regret, best_cost, true};
  }
}

double perturbed(double cost, CostNoise* noise) { return noise ? (*noise)(cost) : cost; }

template <class Solution>
void force_remaining(const Instance& inst, Solution& sol, const std::vector<int>& pending,
                     InsertionOutcome& outcome) {
  for (int c : pending) {
    apply_insertion(sol, forced_insertion(inst, sol, c));
    outcome.forced.push_back(c);
  }
}

}  // namespace

InsertionOutcome regret_insert(const Instance& inst, MopSolution& sol, std::vector<int> pending,
                               int k, CostNoise* noise) {
  InsertionOutcome outcome;
  std::sort(pending.begin(), pending.end());
  // cache[i][r]: best feasible insertion of pending[i] into route r
  std::vector<std::vector<RankedCandidate>> cache;
  cache.reserve(pending.size());
  for (int c : pending) cache.push_back(mop_per_route(inst, sol, c, noise));

  std::vector<Option> options;
  while (!pending.empty()) {
    Selection selection;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      options.clear();
      for (const auto& entry : cache[i]) {
        if (entry.cand) options.push_back({entry.rank, *entry.cand});
      }
      consider(options, i, k, selection);
    }
    if (!selection.found) break;
    apply_insertion(sol, selection.cand);
    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(selection.index));
    cache.erase(cache.begin() + static_cast<std::ptrdiff_t>(selection.index));

    const int r = selection.cand.route;
    const bool was_empty = sol.routes[static_cast<std::size_t>(r)].size() == 1;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (was_empty) {
        // Empty-route entries were shared copies; refresh them all.
        cache[i] = mop_per_route(inst, sol, pending[i], noise);
      } else {
        cache[i][static_cast<std::size_t>(r)] = mop_ranked_in_route(inst, sol, pending[i], r, noise);
      }
    }
  }
  force_remaining(inst, sol, pending, outcome);
  return outcome;
}

InsertionOutcome regret_insert(const Instance& inst, CpSolution& sol, std::vector<int> pending,
                               int k, CostNoise* noise) {
  InsertionOutcome outcome;
  std::sort(pending.begin(), pending.end());
  std::vector<Option> options;
  while (!pending.empty()) {
    const CpContext ctx = CpContext::build(inst, sol);
    Selection selection;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      options.clear();
      for (const auto& cand : cp_k_best_routes(ctx, sol, pending[i], std::max(k, 1))) {
        options.push_back({perturbed(cand.delta_total, noise), cand});
      }
      consider(options, i, k, selection);
    }
    if (!selection.found) break;
    apply_insertion(sol, selection.cand);
    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(selection.index));
  }
  force_remaining(inst, sol, pending, outcome);
  return outcome;
}

namespace {
std::vector<int> all_customers(const Instance& inst) {
  std::vector<int> ids(static_cast<std::size_t>(inst.num_customers()));
  std::iota(ids.begin(), ids.end(), 1);
  return ids;
}
}  // namespace

Construction<MopSolution> parallel_construct_mop(const Instance& inst) {
  Construction<MopSolution> out{MopSolution::empty(inst), {}};
  out.forced = regret_insert(inst, out.solution, all_customers(inst), 1).forced;
  return out;
}

Construction<CpSolution> parallel_construct_cp(const Instance& inst) {
  Construction<CpSolution> out{CpSolution::empty(inst), {}};
  out.forced = regret_insert(inst, out.solution, all_customers(inst), 1).forced;
  return out;
}

FleetSize fleet_size(const Instance& inst) {
  FleetSize result;
  Instance single = inst;
  single.num_vehicles = 1;

  std::vector<int> unrouted;
  for (int c = 1; c <= inst.num_customers(); ++c) {
    MopSolution alone = MopSolution::empty(single);
    if (mop_best_in_route(single, alone, c, 0)) {
      unrouted.push_back(c);
    } else {
      result.unroutable.push_back(c);
    }
  }

  while (!unrouted.empty()) {
    MopSolution sol = MopSolution::empty(single);
    while (true) {
      std::optional<InsertionCandidate> best;
      std::size_t best_idx = 0;
      for (std::size_t i = 0; i < unrouted.size(); ++i) {
        auto cand = mop_best_in_route(single, sol, unrouted[i], 0);
        if (cand && (!best || cand->delta_total < best->delta_total - kTolerance)) {
          best = cand;
          best_idx = i;
        }
      }
      if (!best) break;
      apply_insertion(sol, *best);
      unrouted.erase(unrouted.begin() + static_cast<std::ptrdiff_t>(best_idx));
    }
    ++result.vehicles;
  }
  return result;
}

}  // namespace mopvrp
