#pragma once

// Exact brute-force solvers for tiny instances, and LP export of the two
// mixed-integer models.

#include <string>

#include "mopvrp/model.hpp"

namespace mopvrp {

inline constexpr int kOracleMaxCustomers = 9;
inline constexpr int kOracleMaxVehicles = 3;
inline constexpr int kOracleMaxMachines = 3;

class OracleSizeError : public InputError {
 public:
  using InputError::InputError;
};

enum class Execution { Serial, Parallel };

template <class Solution>
struct OracleResult {
  bool feasible = false;
  double objective = 0.0;  // evaluator objective of `solution` when feasible
  Solution solution;
};

/// Optimal MoP solution. Only in-line production orders are considered, and
/// vehicle machines are interchangeable, so each route is searched once per
/// customer subset and the subsets are combined by dynamic programming.
/// Throws OracleSizeError beyond 9 customers, 3 vehicles or 3 machines.
OracleResult<MopSolution> brute_force_mop(const Instance& inst,
                                          Execution exec = Execution::Parallel);

struct CpOracleOptions {
  Execution exec = Execution::Parallel;
  // With one vehicle: minimize the production makespan, then route at the
  // resulting departure. Off means full enumeration.
  bool single_vehicle_shortcut = true;
};

/// Optimal CP solution over route-grouped depot schedules. Same size guard.
OracleResult<CpSolution> brute_force_cp(const Instance& inst, CpOracleOptions options = {});

/// The MIP of the chosen variant in CPLEX LP format, one constraint per line.
std::string export_mip(const Instance& inst, Variant variant);

}  // namespace mopvrp
