#pragma once

// Minimal CPLEX-LP reader for the exported models, plus a checker that plugs
// a known solution into every row.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mopvrp/model.hpp"

namespace mopvrp::ref {

struct LpTerm {
  double coef = 0.0;
  std::string var;
};

struct LpRow {
  std::string name;
  std::vector<LpTerm> terms;
  std::string sense;  // "<=", ">=" or "="
  double rhs = 0.0;
};

struct LpModel {
  std::vector<LpTerm> objective;
  std::vector<LpRow> rows;
  std::set<std::string> binaries;
  std::set<std::string> free_vars;
  std::set<std::string> variables;  // every name seen anywhere
};

/// Throws std::runtime_error with the line number on anything unexpected.
LpModel parse_lp(const std::string& text);

struct LpCheck {
  std::vector<std::string> problems;  // violated rows and bounds
  double objective = 0.0;
};

/// Unset variables count as 0.
LpCheck substitute(const LpModel& model, const std::map<std::string, double>& values,
                   double tolerance);

/// Variable values describing a complete solution in the exported model.
std::map<std::string, double> lp_values(const Instance& inst, const MopSolution& sol);
std::map<std::string, double> lp_values(const Instance& inst, const CpSolution& sol);

}  // namespace mopvrp::ref
