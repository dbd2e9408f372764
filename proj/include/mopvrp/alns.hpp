#pragma once

// Adaptive large neighborhood search with threshold acceptance.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "mopvrp/model.hpp"
#include "mopvrp/search.hpp"

namespace mopvrp {

struct AlnsConfig {
  int n_max = 25000;
  double t_initial = 0.10;
  double removal_min = 0.10;  // lambda1
  double removal_max = 0.40;  // lambda2
  int segment_length = 100;
  double score_best = 33.0;
  double score_better = 9.0;
  double score_accepted = 13.0;
  double reaction = 0.1;
  double noise_level = 0.025;  // times the largest distance
  double u_worst = 3.0;
  double u_related = 6.0;
  std::uint64_t rng_seed = 1;
  // Acceptance and best tracking use objective + penalty * violation, so a
  // forced (infeasible) insertion never displaces a feasible incumbent.
  double violation_penalty = 1e6;

  static AlnsConfig defaults(Variant variant);

  /// Throws InputError on out-of-range fields.
  void validate() const;
};

enum class DestroyOp { Random, Worst, WorstDelay, WorstDistance, Geo, Demand };
inline constexpr int kDestroyOps = 6;
inline constexpr int kRepairOps = 4;  // regret-1 .. regret-4

std::string_view to_string(DestroyOp op);

/// Roulette weights plus the running segment tallies.
struct OperatorBank {
  std::vector<double> destroy_weights = std::vector<double>(kDestroyOps, 1.0);
  std::vector<double> repair_weights = std::vector<double>(kRepairOps, 1.0);
  std::vector<double> noise_weights = std::vector<double>(2, 1.0);  // [off, on]

  std::vector<double> destroy_scores = std::vector<double>(kDestroyOps, 0.0);
  std::vector<double> repair_scores = std::vector<double>(kRepairOps, 0.0);
  std::vector<double> noise_scores = std::vector<double>(2, 0.0);
  std::vector<int> destroy_uses = std::vector<int>(kDestroyOps, 0);
  std::vector<int> repair_uses = std::vector<int>(kRepairOps, 0);
  std::vector<int> noise_uses = std::vector<int>(2, 0);

  /// Folds the segment tallies into the weights and clears them.
  void end_segment(double reaction);
};

/// w <- w (1 - r) + r * score / uses for every entry with uses > 0.
void update_weights(std::vector<double>& weights, const std::vector<double>& scores,
                    const std::vector<int>& uses, double reaction);

/// Index drawn with probability proportional to weight.
int roulette(const std::vector<double>& weights, std::mt19937_64& rng);

struct IterationRecord {
  int iteration = 0;
  double current = 0.0;
  double best = 0.0;
  DestroyOp destroy = DestroyOp::Random;
  int regret_k = 1;
  bool noise = false;
  bool accepted = false;
};

struct RunStats {
  double initial_objective = 0.0;
  std::vector<IterationRecord> trace;
  std::array<int, kDestroyOps> destroy_calls{};
  std::array<int, kRepairOps> repair_calls{};
  std::array<int, 2> noise_calls{};
  int forced_insertions = 0;
  OperatorBank final_bank;
  double wall_seconds = 0.0;
};

/// Columns: iteration, current, best, operator, accepted.
void write_stats_csv(std::ostream& out, const RunStats& stats);

template <class Solution>
struct AlnsResult {
  Solution best;
  Timeline timeline;
  bool feasible = true;
  RunStats stats;
};

/// Phi uniform in [floor(lambda1 n), floor(lambda2 n)], at least 1 and at most n.
int draw_removal_count(const AlnsConfig& config, int n, std::mt19937_64& rng);

/// floor(sigma^u * size) with sigma uniform in [0, 1).
std::size_t randomized_index(std::size_t size, double u, std::mt19937_64& rng);

enum class SavingKind { Total, Delay, Distance };

/// (customer, f(s) - f(s without customer)) for every routed customer, in
/// ascending customer order. Delay and Distance use the matching cost part.
std::vector<std::pair<int, double>> removal_savings(const Instance& inst, const MopSolution& sol,
                                                    SavingKind kind);
std::vector<std::pair<int, double>> removal_savings(const Instance& inst, const CpSolution& sol,
                                                    SavingKind kind);

// Destroy operators. Each removes customers in place and returns them in
// removal order.
template <class Solution>
std::vector<int> random_removal(Solution& sol, int phi, std::mt19937_64& rng);
template <class Solution>
std::vector<int> worst_removal(const Instance& inst, Solution& sol, int phi, double u,
                               SavingKind kind, std::mt19937_64& rng);
template <class Solution>
std::vector<int> geo_removal(const Instance& inst, Solution& sol, int phi, double u,
                             std::mt19937_64& rng);
template <class Solution>
std::vector<int> demand_removal(const Instance& inst, Solution& sol, int phi, double u,
                                std::mt19937_64& rng);

/// Regret-k insertion of `pending`, with cost noise of amplitude
/// noise_level * max distance when `noise` is set.
template <class Solution>
InsertionOutcome regret_k_repair(const Instance& inst, Solution& sol, std::vector<int> pending,
                                 int k, bool noise, const AlnsConfig& config,
                                 std::mt19937_64& rng);

AlnsResult<MopSolution> run_mop(const Instance& inst, const AlnsConfig& config);
AlnsResult<CpSolution> run_cp(const Instance& inst, const AlnsConfig& config);

}  // namespace mopvrp
