#pragma once

// Canonical JSON ("format": 1) for instances, solutions and search configs.
// Readers reject unknown fields, wrong kinds and other format versions.

#include <string>
#include <string_view>

#include "mopvrp/alns.hpp"
#include "mopvrp/model.hpp"

namespace mopvrp {

inline constexpr int kFormatVersion = 1;

std::string write_instance_json(const Instance& inst);
Instance read_instance_json(std::string_view text);

std::string write_solution_json(const MopSolution& sol);
std::string write_solution_json(const CpSolution& sol);
/// Sizes are checked against the instance; coverage is not.
MopSolution read_mop_solution_json(std::string_view text, const Instance& inst);
CpSolution read_cp_solution_json(std::string_view text, const Instance& inst);

/// Fields mirror AlnsConfig; missing fields keep the variant's defaults.
AlnsConfig read_config_json(std::string_view text, Variant variant);
std::string write_config_json(const AlnsConfig& config);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace mopvrp
