#include "mopvrp/alns.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <ostream>
#include <unordered_set>

namespace mopvrp {

AlnsConfig AlnsConfig::defaults(Variant variant) {
  AlnsConfig c;
  if (variant == Variant::Cp) {
    c.t_initial = 0.175;
    c.removal_min = 0.05;
    c.removal_max = 0.50;
  }
  return c;
}

void AlnsConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InputError(std::string("invalid ALNS config: ") + what);
  };
  require(n_max >= 0, "n_max must be >= 0");
  require(t_initial > 0.0, "t_initial must be > 0");
  require(removal_min > 0.0 && removal_min <= removal_max && removal_max < 1.0,
          "removal range needs 0 < min <= max < 1");
  require(segment_length >= 1, "segment_length must be >= 1");
  require(reaction > 0.0 && reaction <= 1.0, "reaction must be in (0, 1]");
  require(noise_level >= 0.0, "noise_level must be >= 0");
  require(u_worst > 0.0 && u_related > 0.0, "randomization exponents must be > 0");
  require(score_best >= 0.0 && score_better >= 0.0 && score_accepted >= 0.0,
          "scores must be >= 0");
  require(violation_penalty >= 0.0, "violation_penalty must be >= 0");
}

std::string_view to_string(DestroyOp op) {
  switch (op) {
    case DestroyOp::Random: return "random";
    case DestroyOp::Worst: return "worst";
    case DestroyOp::WorstDelay: return "worst_delay";
    case DestroyOp::WorstDistance: return "worst_dist";
    case DestroyOp::Geo: return "geo";
    case DestroyOp::Demand: return "demand";
  }
  return "?";
}

void update_weights(std::vector<double>& weights, const std::vector<double>& scores,
                    const std::vector<int>& uses, double reaction) {
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (uses[i] > 0) {
      weights[i] = weights[i] * (1.0 - reaction) + reaction * scores[i] / uses[i];
    }
  }
}

void OperatorBank::end_segment(double reaction) {
  update_weights(destroy_weights, destroy_scores, destroy_uses, reaction);
  update_weights(repair_weights, repair_scores, repair_uses, reaction);
  update_weights(noise_weights, noise_scores, noise_uses, reaction);
  std::fill(destroy_scores.begin(), destroy_scores.end(), 0.0);
  std::fill(repair_scores.begin(), repair_scores.end(), 0.0);
  std::fill(noise_scores.begin(), noise_scores.end(), 0.0);
  std::fill(destroy_uses.begin(), destroy_uses.end(), 0);
  std::fill(repair_uses.begin(), repair_uses.end(), 0);
  std::fill(noise_uses.begin(), noise_uses.end(), 0);
}

int roulette(const std::vector<double>& weights, std::mt19937_64& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double pick = std::uniform_real_distribution<double>(0.0, total)(rng);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (pick < weights[i]) return static_cast<int>(i);
    pick -= weights[i];
  }
  return static_cast<int>(weights.size()) - 1;
}

void write_stats_csv(std::ostream& out, const RunStats& stats) {
  out << "iteration,current,best,operator,accepted\n";
  char line[160];
  for (const auto& rec : stats.trace) {
    std::snprintf(line, sizeof line, "%d,%.6f,%.6f,%s+regret-%d%s,%d\n", rec.iteration,
                  rec.current, rec.best, std::string(to_string(rec.destroy)).c_str(),
                  rec.regret_k, rec.noise ? "+noise" : "", rec.accepted ? 1 : 0);
    out << line;
  }
}

int draw_removal_count(const AlnsConfig& config, int n, std::mt19937_64& rng) {
  const int lo = static_cast<int>(std::floor(config.removal_min * n));
  const int hi = static_cast<int>(std::floor(config.removal_max * n));
  const int phi = std::uniform_int_distribution<int>(lo, std::max(lo, hi))(rng);
  return std::clamp(phi, 1, std::max(n, 1));
}

std::size_t randomized_index(std::size_t size, double u, std::mt19937_64& rng) {
  const double sigma = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const auto idx = static_cast<std::size_t>(std::floor(std::pow(sigma, u) * static_cast<double>(size)));
  return std::min(idx, size - 1);
}

// ------------------------------------------------------------------ savings

namespace {

double pick_saving(const Instance& inst, SavingKind kind, double dtravel, double ddelay) {
  switch (kind) {
    case SavingKind::Delay: return ddelay;
    case SavingKind::Distance: return dtravel;
    case SavingKind::Total: break;
  }
  return inst.weights.travel * dtravel + inst.weights.delay * ddelay;
}

template <class Solution>
std::vector<int> routed_customers(const Solution& sol) {
  std::vector<int> out;
  for (const auto& r : sol.routes) out.insert(out.end(), r.begin(), r.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<std::pair<int, double>> removal_savings(const Instance& inst, const MopSolution& sol,
                                                    SavingKind kind) {
  std::vector<std::pair<int, double>> out;
  for (const auto& route : sol.routes) {
    if (route.empty()) continue;
    const RouteCost base = mop_route_cost(inst, route, sol.machine_of);
    for (int c : route) {
      const RouteCost without = mop_route_cost(inst, route, sol.machine_of, c);
      out.emplace_back(c, pick_saving(inst, kind, base.travel - without.travel,
                                      base.delay - without.delay));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<int, double>> removal_savings(const Instance& inst, const CpSolution& sol,
                                                    SavingKind kind) {
  const Timeline base = evaluate_cp(inst, sol, Coverage::Partial);
  std::vector<std::pair<int, double>> out;
  for (int c : routed_customers(sol)) {
    CpSolution without = sol;
    remove_customer(without, c);
    const Timeline tl = evaluate_cp(inst, without, Coverage::Partial);
    out.emplace_back(c, pick_saving(inst, kind, base.travel_cost - tl.travel_cost,
                                    base.delay_cost - tl.delay_cost));
  }
  return out;
}

// ------------------------------------------------------------------ destroy

template <class Solution>
std::vector<int> random_removal(Solution& sol, int phi, std::mt19937_64& rng) {
  std::vector<int> pool = routed_customers(sol);
  const auto count = std::min(static_cast<std::size_t>(std::max(phi, 0)), pool.size());
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = std::uniform_int_distribution<std::size_t>(i, pool.size() - 1)(rng);
    std::swap(pool[i], pool[j]);
    remove_customer(sol, pool[i]);
  }
  pool.resize(count);
  return pool;
}

template <class Solution>
std::vector<int> worst_removal(const Instance& inst, Solution& sol, int phi, double u,
                               SavingKind kind, std::mt19937_64& rng) {
  std::vector<int> removed;
  for (int step = 0; step < phi; ++step) {
    auto savings = removal_savings(inst, sol, kind);
    if (savings.empty()) break;
    std::stable_sort(savings.begin(), savings.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    const int victim = savings[randomized_index(savings.size(), u, rng)].first;
    remove_customer(sol, victim);
    removed.push_back(victim);
  }
  return removed;
}

namespace {

template <class Solution>
std::vector<int> related_removal(Solution& sol, int phi, double u, std::mt19937_64& rng,
                                 const std::function<double(int, int)>& relatedness) {
  std::vector<int> pool = routed_customers(sol);
  if (pool.empty() || phi <= 0) return {};
  const int seed = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
  std::vector<int> removed{seed};
  pool.erase(std::find(pool.begin(), pool.end(), seed));
  std::stable_sort(pool.begin(), pool.end(), [&](int a, int b) {
    return relatedness(seed, a) < relatedness(seed, b);
  });
  while (static_cast<int>(removed.size()) < phi && !pool.empty()) {
    const auto idx = randomized_index(pool.size(), u, rng);
    removed.push_back(pool[idx]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
  }
  for (int c : removed) remove_customer(sol, c);
  return removed;
}

}  // namespace

template <class Solution>
std::vector<int> geo_removal(const Instance& inst, Solution& sol, int phi, double u,
                             std::mt19937_64& rng) {
  return related_removal(sol, phi, u, rng, [&](int q, int i) {
    return inst.dist(static_cast<std::size_t>(q), static_cast<std::size_t>(i));
  });
}

template <class Solution>
std::vector<int> demand_removal(const Instance& inst, Solution& sol, int phi, double u,
                                std::mt19937_64& rng) {
  return related_removal(sol, phi, u, rng, [&](int q, int i) {
    return std::abs(inst.customer(q).demand - inst.customer(i).demand);
  });
}

// ------------------------------------------------------------------ repair

namespace {
double max_distance(const Instance& inst) {
  double best = 0.0;
  for (std::size_t i = 0; i < inst.dist.size(); ++i) {
    for (std::size_t j = 0; j < inst.dist.size(); ++j) best = std::max(best, inst.dist(i, j));
  }
  return best;
}
}  // namespace

template <class Solution>
InsertionOutcome regret_k_repair(const Instance& inst, Solution& sol, std::vector<int> pending,
                                 int k, bool noise, const AlnsConfig& config,
                                 std::mt19937_64& rng) {
  CostNoise perturb{&rng, config.noise_level * max_distance(inst)};
  return regret_insert(inst, sol, std::move(pending), k, noise ? &perturb : nullptr);
}

// ------------------------------------------------------------------ search

namespace {

Construction<MopSolution> construct(const Instance& inst, const MopSolution*) {
  return parallel_construct_mop(inst);
}
Construction<CpSolution> construct(const Instance& inst, const CpSolution*) {
  return parallel_construct_cp(inst);
}

void hash_mix(std::uint64_t& h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
}

std::uint64_t solution_hash(const MopSolution& sol) {
  std::uint64_t h = 0;
  for (const auto& r : sol.routes) {
    hash_mix(h, r.size());
    for (int c : r) hash_mix(h, static_cast<std::uint64_t>(c) * 131 +
                                    static_cast<std::uint64_t>(sol.machine_of[static_cast<std::size_t>(c)]));
  }
  return h;
}

std::uint64_t solution_hash(const CpSolution& sol) {
  std::uint64_t h = 0;
  for (const auto& r : sol.routes) {
    hash_mix(h, r.size());
    for (int c : r) hash_mix(h, static_cast<std::uint64_t>(c));
  }
  for (const auto& jobs : sol.machine_jobs) {
    hash_mix(h, jobs.size() + 0x100000ULL);
    for (int c : jobs) hash_mix(h, static_cast<std::uint64_t>(c));
  }
  return h;
}

template <class Solution>
std::vector<int> destroy(const Instance& inst, Solution& sol, DestroyOp op, int phi,
                         const AlnsConfig& config, std::mt19937_64& rng) {
  switch (op) {
    case DestroyOp::Random: return random_removal(sol, phi, rng);
    case DestroyOp::Worst:
      return worst_removal(inst, sol, phi, config.u_worst, SavingKind::Total, rng);
    case DestroyOp::WorstDelay:
      return worst_removal(inst, sol, phi, config.u_worst, SavingKind::Delay, rng);
    case DestroyOp::WorstDistance:
      return worst_removal(inst, sol, phi, config.u_worst, SavingKind::Distance, rng);
    case DestroyOp::Geo: return geo_removal(inst, sol, phi, config.u_related, rng);
    case DestroyOp::Demand: return demand_removal(inst, sol, phi, config.u_related, rng);
  }
  return {};
}

template <class Solution>
AlnsResult<Solution> run_impl(const Instance& inst, const AlnsConfig& config) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  std::mt19937_64 rng(config.rng_seed);

  auto cost = [&](const Solution& sol) {
    const Timeline tl = evaluate(inst, sol);
    return tl.objective + config.violation_penalty * timing_violation(inst, tl);
  };

  AlnsResult<Solution> result;
  RunStats& stats = result.stats;
  auto built = construct(inst, static_cast<const Solution*>(nullptr));
  stats.forced_insertions += static_cast<int>(built.forced.size());
  Solution current = std::move(built.solution);
  Solution best = current;
  double f_current = cost(current);
  double f_best = f_current;
  stats.initial_objective = f_best;

  OperatorBank bank;
  std::unordered_set<std::uint64_t> visited{solution_hash(current)};
  const int n = inst.num_customers();
  const int iterations = n > 0 ? config.n_max : 0;
  stats.trace.reserve(static_cast<std::size_t>(iterations));
  double threshold = config.t_initial;
  const double cooling = config.n_max > 0 ? config.t_initial / config.n_max : 0.0;

  for (int it = 0; it < iterations; ++it) {
    const int noise = roulette(bank.noise_weights, rng);
    const int d = roulette(bank.destroy_weights, rng);
    const int k = roulette(bank.repair_weights, rng) + 1;
    const auto op = static_cast<DestroyOp>(d);

    Solution candidate = current;
    const int phi = draw_removal_count(config, n, rng);
    auto removed = destroy(inst, candidate, op, phi, config, rng);
    auto outcome = regret_k_repair(inst, candidate, std::move(removed), k, noise == 1, config, rng);
    stats.forced_insertions += static_cast<int>(outcome.forced.size());
    const double f_new = cost(candidate);

    const bool accepted =
        f_best > 0.0 ? (f_new - f_best) / f_best < threshold : f_new < f_best;
    double score = 0.0;
    if (accepted) {
      const bool fresh = visited.insert(solution_hash(candidate)).second;
      if (f_new < f_best) {
        score = config.score_best;
        best = candidate;
        f_best = f_new;
      } else if (fresh && f_new < f_current) {
        score = config.score_better;
      } else if (fresh) {
        score = config.score_accepted;
      }
      current = std::move(candidate);
      f_current = f_new;
    }

    bank.destroy_scores[static_cast<std::size_t>(d)] += score;
    bank.repair_scores[static_cast<std::size_t>(k - 1)] += score;
    bank.noise_scores[static_cast<std::size_t>(noise)] += score;
    ++bank.destroy_uses[static_cast<std::size_t>(d)];
    ++bank.repair_uses[static_cast<std::size_t>(k - 1)];
    ++bank.noise_uses[static_cast<std::size_t>(noise)];
    ++stats.destroy_calls[static_cast<std::size_t>(d)];
    ++stats.repair_calls[static_cast<std::size_t>(k - 1)];
    ++stats.noise_calls[static_cast<std::size_t>(noise)];
    stats.trace.push_back({it, f_current, f_best, op, k, noise == 1, accepted});

    if ((it + 1) % config.segment_length == 0) bank.end_segment(config.reaction);
    threshold = std::max(0.0, threshold - cooling);
  }

  stats.final_bank = bank;
  result.timeline = evaluate(inst, best);
  result.feasible = check_feasibility(inst, best).feasible;
  result.best = std::move(best);
  stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace

AlnsResult<MopSolution> run_mop(const Instance& inst, const AlnsConfig& config) {
  return run_impl<MopSolution>(inst, config);
}

AlnsResult<CpSolution> run_cp(const Instance& inst, const AlnsConfig& config) {
  return run_impl<CpSolution>(inst, config);
}

#define MOPVRP_INSTANTIATE(S)                                                                    \
  template std::vector<int> random_removal<S>(S&, int, std::mt19937_64&);                        \
  template std::vector<int> worst_removal<S>(const Instance&, S&, int, double, SavingKind,       \
                                             std::mt19937_64&);                                  \
  template std::vector<int> geo_removal<S>(const Instance&, S&, int, double, std::mt19937_64&);  \
  template std::vector<int> demand_removal<S>(const Instance&, S&, int, double,                  \
                                              std::mt19937_64&);                                 \
  template InsertionOutcome regret_k_repair<S>(const Instance&, S&, std::vector<int>, int, bool, \
                                               const AlnsConfig&, std::mt19937_64&);

MOPVRP_INSTANTIATE(MopSolution)
MOPVRP_INSTANTIATE(CpSolution)

#undef MOPVRP_INSTANTIATE

}  // namespace mopvrp
