#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mopvrp/model.hpp"

namespace mopvrp::cli {

/// Runs the command line; returns the process exit code. Kept separate from
/// main() so tests can drive it with captured streams.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Canonical JSON, or Solomon text when the file does not start with '{'.
Instance load_instance(const std::string& path);

/// Worker count for parallel runs: MOPVRP_THREADS if set, else the OpenMP
/// default, never more than `jobs`.
int worker_count(int jobs);

}  // namespace mopvrp::cli
