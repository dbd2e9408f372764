#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "mopvrp/search.hpp"
#include "reference.hpp"

namespace mopvrp {
namespace {

std::size_t at(int i) { return static_cast<std::size_t>(i); }

// Removes one random routed customer; returns it.
template <class Solution>
int drop_random(Solution& sol, std::mt19937_64& rng) {
  std::vector<int> routed;
  for (const auto& r : sol.routes) routed.insert(routed.end(), r.begin(), r.end());
  const int c = routed[std::uniform_int_distribution<std::size_t>(0, routed.size() - 1)(rng)];
  remove_customer(sol, c);
  return c;
}

TEST(CandidatePositions, RouteAbsentTriesEveryBoundary) {
  const std::vector<int> tags{0, 0, 2, 1, 1};
  const auto pos = cp_candidate_positions(tags, 3);
  EXPECT_EQ(pos, (std::vector<ProductionSlot>{{0, false}, {2, false}, {3, false}, {5, false}}));
}

TEST(CandidatePositions, RoutePresentAddsRelocations) {
  const std::vector<int> tags{0, 0, 2, 1, 1};
  const auto pos = cp_candidate_positions(tags, 0);
  EXPECT_EQ(pos, (std::vector<ProductionSlot>{
                     {0, false}, {3, true}, {3, false}, {5, true}, {5, false}}));
}

TEST(CandidatePositions, EmptyMachine) {
  EXPECT_EQ(cp_candidate_positions(std::vector<int>{}, 0), (std::vector<ProductionSlot>{{0, false}}));
}

TEST(ApplyInsertion, CpRelocateMovesEarlierJobs) {
  CpSolution sol;
  sol.routes = {{1, 2}, {3}};
  sol.machine_jobs = {{1, 3, 2}};
  InsertionCandidate cand;
  cand.customer = 4;
  cand.route = 0;
  cand.position = 2;
  cand.machine = 0;
  cand.prod_position = 3;
  cand.relocate_group = true;
  apply_insertion(sol, cand);
  EXPECT_EQ(sol.routes[0], (Route{1, 2, 4}));
  EXPECT_EQ(sol.machine_jobs[0], (std::vector<int>{3, 1, 2, 4}));
}

TEST(RemoveCustomer, UndoesInsertion) {
  std::mt19937_64 rng(31);
  const Instance inst = ref::random_instance(rng, {6, 2, 2, 5.0});
  const CpSolution sol = ref::random_cp_solution(inst, rng, true);
  CpSolution partial = sol;
  remove_customer(partial, 3);
  EXPECT_EQ(std::count(partial.routes[0].begin(), partial.routes[0].end(), 3) +
                std::count(partial.routes[1].begin(), partial.routes[1].end(), 3),
            0);
  for (const auto& jobs : partial.machine_jobs) EXPECT_EQ(std::count(jobs.begin(), jobs.end(), 3), 0);
}

// Best MoP insertion versus trying every (route, position, machine) and
// re-timing with the simulator.
TEST(MopInsertionProperty, MatchesExhaustiveScan) {
  std::mt19937_64 rng(32);
  int compared = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Instance inst = ref::random_instance(rng, {3 + trial % 5, 1 + trial % 3, 1 + trial % 3, 0.0});
    MopSolution sol = ref::random_mop_solution(inst, rng);
    const int c = drop_random(sol, rng);
    const ref::Outcome base = ref::simulate_mop(inst, sol);

    bool found = false;
    double best = 0.0;
    for (std::size_t r = 0; r < sol.routes.size(); ++r) {
      for (std::size_t pos = 0; pos <= sol.routes[r].size(); ++pos) {
        for (int l = 0; l < inst.machines_per_vehicle; ++l) {
          MopSolution cand = sol;
          cand.routes[r].insert(cand.routes[r].begin() + static_cast<std::ptrdiff_t>(pos), c);
          cand.machine_of[at(c)] = l;
          const ref::Outcome o = ref::simulate_mop(inst, cand);
          // Only the touched route must be feasible; others are as they were.
          const bool cap_ok = [&] {
            double load = 0.0;
            for (int x : cand.routes[r]) load += inst.customer(x).demand;
            return load <= inst.capacity + 1e-9;
          }();
          const bool dur_ok = cand.routes[r].empty() || o.ret[r] <= inst.max_duration + 1e-9;
          if (!cap_ok || !dur_ok) continue;
          const double delta = o.objective - base.objective;
          if (!found || delta < best) {
            found = true;
            best = delta;
          }
        }
      }
    }
    const auto got = mop_best_insertion(inst, sol, c);
    ASSERT_EQ(got.has_value(), found) << "trial " << trial;
    if (!found) continue;
    ++compared;
    EXPECT_NEAR(got->delta_total, best, 1e-9) << "trial " << trial;
    MopSolution applied = sol;
    apply_insertion(applied, *got);
    EXPECT_NEAR(ref::simulate_mop(inst, applied).objective, base.objective + got->delta_total, 1e-9);
  }
  EXPECT_GT(compared, 200);
}

TEST(CpInsertionProperty, IntegratedMatchesExhaustiveScan) {
  std::mt19937_64 rng(33);
  int compared = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const double h = trial % 2 ? 12.0 : 0.0;
    const Instance inst = ref::random_instance(rng, {3 + trial % 5, 1 + trial % 3, 1 + trial % 2, h});
    CpSolution sol = ref::random_cp_solution(inst, rng, true);
    const int c = drop_random(sol, rng);
    const ref::Outcome base = ref::simulate_cp(inst, sol);
    if (!base.feasible) continue;
    const ref::InsertionBest want = ref::exhaustive_cp_insertion(inst, sol, c);
    const auto got = cp_integrated_insertion(inst, sol, c);
    ASSERT_EQ(got.has_value(), want.found) << "trial " << trial;
    if (!got) continue;
    ++compared;
    EXPECT_NEAR(base.objective + got->delta_total, want.objective, 1e-9) << "trial " << trial;
    CpSolution applied = sol;
    apply_insertion(applied, *got);
    const ref::Outcome after = ref::simulate_cp(inst, applied);
    EXPECT_TRUE(after.feasible);
    EXPECT_NEAR(after.objective, want.objective, 1e-9);
  }
  EXPECT_GT(compared, 60);
}

TEST(CpInsertionProperty, DecomposedIsFeasibleAndNeverBetter) {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 150; ++trial) {
    const Instance inst = ref::random_instance(rng, {3 + trial % 5, 1 + trial % 3, 1 + trial % 2, 8.0});
    CpSolution sol = ref::random_cp_solution(inst, rng, true);
    const int c = drop_random(sol, rng);
    if (!ref::simulate_cp(inst, sol).feasible) continue;
    const auto integrated = cp_integrated_insertion(inst, sol, c);
    const auto decomposed = cp_decomposed_insertion(inst, sol, c);
    if (!decomposed) continue;
    ASSERT_TRUE(integrated.has_value());
    EXPECT_GE(decomposed->delta_total, integrated->delta_total - 1e-9);
    CpSolution applied = sol;
    apply_insertion(applied, *decomposed);
    const ref::Outcome after = ref::simulate_cp(inst, applied);
    EXPECT_TRUE(after.feasible);
    EXPECT_NEAR(after.objective, ref::simulate_cp(inst, sol).objective + decomposed->delta_total, 1e-9);
  }
}

TEST(CpInsertionProperty, KBestRoutesAreDistinctSortedAndExact) {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 100; ++trial) {
    const Instance inst = ref::random_instance(rng, {6, 3, 1 + trial % 2, 5.0});
    CpSolution sol = ref::random_cp_solution(inst, rng, true);
    const int c = drop_random(sol, rng);
    if (!ref::simulate_cp(inst, sol).feasible) continue;
    const auto cands = cp_k_best_routes(inst, sol, c, 3);
    std::set<int> routes;
    const double base = ref::simulate_cp(inst, sol).objective;
    for (std::size_t q = 0; q < cands.size(); ++q) {
      routes.insert(cands[q].route);
      if (q > 0) EXPECT_GE(cands[q].delta_total, cands[q - 1].delta_total);
      CpSolution applied = sol;
      apply_insertion(applied, cands[q]);
      EXPECT_NEAR(ref::simulate_cp(inst, applied).objective, base + cands[q].delta_total, 1e-9);
    }
    EXPECT_EQ(routes.size(), cands.size());
    const auto one = cp_k_best_routes(inst, sol, c, 1);
    const auto dec = cp_decomposed_insertion(inst, sol, c);
    ASSERT_EQ(one.empty(), !dec.has_value());
    if (dec) EXPECT_NEAR(one[0].delta_total, dec->delta_total, 1e-12);
  }
}

TEST(Regret, InsertsEveryCustomer) {
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 60; ++trial) {
    const Instance inst = ref::random_instance(rng, {7, 3, 2, 5.0});
    for (int k = 1; k <= 4; ++k) {
      MopSolution mop = MopSolution::empty(inst);
      std::vector<int> all{1, 2, 3, 4, 5, 6, 7};
      regret_insert(inst, mop, all, k);
      EXPECT_NO_THROW(evaluate_mop(inst, mop));
      CpSolution cp = CpSolution::empty(inst);
      const InsertionOutcome out = regret_insert(inst, cp, all, k);
      EXPECT_NO_THROW(evaluate_cp(inst, cp));
      if (out.forced.empty()) EXPECT_TRUE(check_feasibility(inst, cp).feasible);
    }
  }
}

TEST(Construction, ParallelConstructionCoversAll) {
  std::mt19937_64 rng(37);
  const Instance inst = ref::random_instance(rng, {8, 3, 2, 5.0});
  const auto mop = parallel_construct_mop(inst);
  EXPECT_NO_THROW(evaluate_mop(inst, mop.solution));
  const auto cp = parallel_construct_cp(inst);
  EXPECT_NO_THROW(evaluate_cp(inst, cp.solution));
  if (mop.forced.empty()) EXPECT_TRUE(check_feasibility(inst, mop.solution).feasible);
}

TEST(FleetSize, ReportsUnroutableCustomers) {
  std::mt19937_64 rng(38);
  Instance inst = ref::random_instance(rng, {5, 2, 1, 0.0});
  inst.max_duration = 1000.0;
  inst.capacity = 100.0;
  EXPECT_EQ(fleet_size(inst).vehicles, 1);
  EXPECT_TRUE(fleet_size(inst).unroutable.empty());
  inst.customers[2].demand = 101.0;
  const FleetSize fs = fleet_size(inst);
  EXPECT_EQ(fs.unroutable, (std::vector<int>{3}));
}

TEST(FleetSize, CapacityForcesMoreRoutes) {
  std::mt19937_64 rng(39);
  Instance inst = ref::random_instance(rng, {6, 1, 1, 0.0});
  inst.max_duration = 1000.0;
  for (auto& c : inst.customers) c.demand = 1.0;
  inst.capacity = 2.0;
  EXPECT_EQ(fleet_size(inst).vehicles, 3);
}

}  // namespace
}  // namespace mopvrp
