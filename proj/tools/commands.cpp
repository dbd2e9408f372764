#include "commands.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "mopvrp/alns.hpp"
#include "mopvrp/costs.hpp"
#include "mopvrp/instances.hpp"
#include "mopvrp/oracle.hpp"
#include "mopvrp/search.hpp"
#include "mopvrp/serialization.hpp"

namespace mopvrp::cli {

Instance load_instance(const std::string& path) {
  const std::string text = read_text_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return read_instance_json(text);
  std::string stem = path.substr(path.find_last_of("/\\") + 1);
  stem = stem.substr(0, stem.find('.'));
  return parse_solomon(text, stem);
}

int worker_count(int jobs) {
  int workers = omp_get_max_threads();
  if (const char* env = std::getenv("MOPVRP_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) workers = cap;
  }
  return std::clamp(workers, 1, std::max(jobs, 1));
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Writes to the file if a path is given, else to `fallback`.
void emit(const std::string& path, const std::string& content, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << content;
  } else {
    write_text_file(path, content);
  }
}

struct RunRow {
  std::uint64_t seed = 0;
  double travel = 0.0;
  double delay = 0.0;
  double objective = 0.0;
  int vehicles = 0;
  double wall = 0.0;
  bool feasible = true;
  std::string solution_json;
  RunStats stats;
};

template <class Solution>
RunRow solve_once(const Instance& inst, const AlnsConfig& config) {
  AlnsResult<Solution> res;
  if constexpr (std::is_same_v<Solution, MopSolution>) {
    res = run_mop(inst, config);
  } else {
    res = run_cp(inst, config);
  }
  RunRow row;
  row.seed = config.rng_seed;
  row.travel = res.timeline.travel_cost;
  row.delay = res.timeline.delay_cost;
  row.objective = res.timeline.objective;
  row.vehicles = vehicles_used(res.best);
  row.wall = res.stats.wall_seconds;
  row.feasible = res.feasible;
  row.solution_json = write_solution_json(res.best);
  row.stats = std::move(res.stats);
  return row;
}

struct SolveOptions {
  std::string instance;
  std::string variant = "mop";
  std::string config;
  std::uint64_t seed = 1;
  int runs = 1;
  int iterations = -1;
  std::string out_csv;
  std::string out_solution;
  std::string stats_csv;
  bool timing = false;
};

int do_solve(const SolveOptions& o, std::ostream& out, std::ostream& err) {
  const Instance inst = load_instance(o.instance);
  const Variant variant = parse_variant(o.variant);
  AlnsConfig base = o.config.empty() ? AlnsConfig::defaults(variant)
                                     : read_config_json(read_text_file(o.config), variant);
  if (o.iterations >= 0) base.n_max = o.iterations;
  base.validate();
  if (o.runs < 1) throw InputError("--runs must be >= 1");

  std::vector<RunRow> rows(static_cast<std::size_t>(o.runs));
  std::vector<std::string> failures(rows.size());
#pragma omp parallel for schedule(dynamic) num_threads(worker_count(o.runs))
  for (int r = 0; r < o.runs; ++r) {
    AlnsConfig config = base;
    config.rng_seed = o.seed + static_cast<std::uint64_t>(r);
    try {
      rows[static_cast<std::size_t>(r)] = variant == Variant::Mop
                                              ? solve_once<MopSolution>(inst, config)
                                              : solve_once<CpSolution>(inst, config);
    } catch (const std::exception& e) {
      failures[static_cast<std::size_t>(r)] = e.what();
    }
  }
  for (const auto& f : failures) {
    if (!f.empty()) throw std::runtime_error(f);
  }

  std::ostringstream csv;
  csv << "instance,variant,seed,travel,delay,objective,vehicles" << (o.timing ? ",wall_seconds" : "")
      << "\n";
  double sum_travel = 0.0, sum_delay = 0.0, sum_obj = 0.0, sum_veh = 0.0, sum_wall = 0.0;
  std::size_t best = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const RunRow& row = rows[r];
    csv << inst.id << "," << to_string(variant) << "," << row.seed << "," << fmt(row.travel) << ","
        << fmt(row.delay) << "," << fmt(row.objective) << "," << row.vehicles;
    if (o.timing) csv << "," << fmt(row.wall);
    csv << "\n";
    sum_travel += row.travel;
    sum_delay += row.delay;
    sum_obj += row.objective;
    sum_veh += row.vehicles;
    sum_wall += row.wall;
    if (!row.feasible) err << "warning: run with seed " << row.seed << " ended infeasible\n";
    const bool better = row.feasible != rows[best].feasible ? row.feasible
                                                            : row.objective < rows[best].objective;
    if (better) best = r;
  }
  const double n = static_cast<double>(rows.size());
  csv << inst.id << "," << to_string(variant) << ",mean," << fmt(sum_travel / n) << ","
      << fmt(sum_delay / n) << "," << fmt(sum_obj / n) << "," << fmt(sum_veh / n);
  if (o.timing) csv << "," << fmt(sum_wall / n);
  csv << "\n";
  emit(o.out_csv, csv.str(), out);

  if (!o.out_solution.empty()) write_text_file(o.out_solution, rows[best].solution_json);
  if (!o.stats_csv.empty()) {
    std::ostringstream stats;
    write_stats_csv(stats, rows.front().stats);
    write_text_file(o.stats_csv, stats.str());
  }
  return 0;
}

double gap_percent(double value, double reference) {
  if (reference == 0.0) {
    return value == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return (value - reference) / reference * 100.0;
}

struct OracleOptions {
  std::string instance;
  std::string variant = "mop";
  std::string compare_solution;
  std::optional<double> compare_objective;
  std::optional<double> reference;
  bool serial = false;
  std::string out_solution;
};

int do_oracle(const OracleOptions& o, std::ostream& out) {
  const Instance inst = load_instance(o.instance);
  const Variant variant = parse_variant(o.variant);
  const Execution exec = o.serial ? Execution::Serial : Execution::Parallel;
  bool feasible = false;
  double optimum = 0.0;
  std::string solution_json;
  if (variant == Variant::Mop) {
    const auto res = brute_force_mop(inst, exec);
    feasible = res.feasible;
    optimum = res.objective;
    solution_json = write_solution_json(res.solution);
  } else {
    CpOracleOptions opts;
    opts.exec = exec;
    const auto res = brute_force_cp(inst, opts);
    feasible = res.feasible;
    optimum = res.objective;
    solution_json = write_solution_json(res.solution);
  }

  std::optional<double> compared = o.compare_objective;
  if (!o.compare_solution.empty()) {
    const std::string text = read_text_file(o.compare_solution);
    compared = variant == Variant::Mop ? evaluate_mop(inst, read_mop_solution_json(text, inst)).objective
                                       : evaluate_cp(inst, read_cp_solution_json(text, inst)).objective;
  }
  out << "instance,variant,feasible,optimum";
  if (compared) out << ",compared,reference,gap_percent";
  out << "\n" << inst.id << "," << to_string(variant) << "," << (feasible ? 1 : 0) << ","
      << (feasible ? fmt(optimum) : std::string("inf"));
  if (compared) {
    const double ref = o.reference.value_or(optimum);
    out << "," << fmt(*compared) << "," << fmt(ref) << "," << fmt(gap_percent(*compared, ref));
  }
  out << "\n";
  if (!o.out_solution.empty() && feasible) write_text_file(o.out_solution, solution_json);
  return feasible ? 0 : 3;
}

// Column means of the per-run rows of one or more solve CSVs.
struct SolveSummary {
  double avg_travel = 0.0;
  double avg_vehicles = 0.0;
  int max_vehicles = 0;
  int runs = 0;
};

SolveSummary summarize_solve_csvs(const std::vector<std::string>& paths) {
  SolveSummary s;
  for (const auto& path : paths) {
    std::istringstream in(read_text_file(path));
    std::string line;
    std::vector<std::string> header;
    auto split = [](const std::string& l) {
      std::vector<std::string> cells;
      std::stringstream ss(l);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      return cells;
    };
    if (!std::getline(in, line)) throw InputError(path + ": empty CSV");
    header = split(line);
    auto column = [&](const char* name) {
      const auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) throw InputError(path + ": missing column " + name);
      return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t seed_col = column("seed");
    const std::size_t travel_col = column("travel");
    const std::size_t veh_col = column("vehicles");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto cells = split(line);
      if (cells.size() != header.size()) throw InputError(path + ": ragged row");
      if (cells[seed_col] == "mean") continue;
      s.avg_travel += std::stod(cells[travel_col]);
      const int veh = std::stoi(cells[veh_col]);
      s.avg_vehicles += veh;
      s.max_vehicles = std::max(s.max_vehicles, veh);
      ++s.runs;
    }
  }
  if (s.runs == 0) throw InputError("no run rows found in the solve CSVs");
  s.avg_travel /= s.runs;
  s.avg_vehicles /= s.runs;
  return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mobile- and central-production vehicle routing toolkit", "mopvrp"};
  app.require_subcommand(1);

  SolveOptions solve;
  auto* s = app.add_subcommand("solve", "Run the ALNS one or more times and report a CSV row per run");
  s->add_option("--instance", solve.instance, "Instance (canonical JSON or Solomon text)")->required();
  s->add_option("--variant", solve.variant, "mop or cp")->check(CLI::IsMember({"mop", "cp"}));
  s->add_option("--config", solve.config, "ALNS config JSON");
  s->add_option("--seed", solve.seed, "Seed of the first run; run r uses seed + r");
  s->add_option("--runs", solve.runs, "Number of runs")->check(CLI::PositiveNumber);
  s->add_option("--iterations", solve.iterations, "Override the iteration budget");
  s->add_option("--out-csv", solve.out_csv, "CSV output path (default stdout)");
  s->add_option("--out-solution", solve.out_solution, "Best solution of all runs as JSON");
  s->add_option("--stats-csv", solve.stats_csv, "Per-iteration trace of the first run");
  s->add_flag("--timing", solve.timing, "Add a wall_seconds column (output is then not reproducible)");

  OracleOptions oracle;
  double compare_objective = 0.0;
  double reference = 0.0;
  auto* o = app.add_subcommand("oracle", "Exact optimum of a tiny instance by enumeration");
  o->add_option("--instance", oracle.instance, "Instance file")->required();
  o->add_option("--variant", oracle.variant, "mop or cp")->check(CLI::IsMember({"mop", "cp"}));
  auto* cs = o->add_option("--compare-solution", oracle.compare_solution, "Solution JSON to compare");
  auto* co = o->add_option("--compare-objective", compare_objective, "Objective value to compare");
  cs->excludes(co);
  auto* ref = o->add_option("--reference", reference, "Gap reference instead of the optimum");
  o->add_flag("--serial", oracle.serial, "Disable the parallel enumeration");
  o->add_option("--out-solution", oracle.out_solution, "Write the optimal solution as JSON");

  std::string solomon_path, bench_out, bench_variant = "mop";
  double mu = 1.0, epsilon = kDefaultEarlyProductionCoefficient;
  int bench_machines = 1;
  auto* gb = app.add_subcommand("gen-benchmark", "Derive an instance from a Solomon file");
  gb->add_option("--solomon", solomon_path, "Solomon text file")->required();
  gb->add_option("--mu", mu, "Production time per unit demand");
  gb->add_option("--machines", bench_machines, "Machines per vehicle")->check(CLI::PositiveNumber);
  gb->add_option("--variant", bench_variant, "mop or cp")->check(CLI::IsMember({"mop", "cp"}));
  gb->add_option("--epsilon", epsilon, "Early-production coefficient (cp)");
  gb->add_option("--out", bench_out, "Output JSON (default stdout)");

  std::string scenario = "S_W", real_out_dir = ".";
  ScenarioSpec spec;
  auto* gr = app.add_subcommand("gen-realistic", "Generate a synthetic city instance");
  gr->add_option("--scenario", scenario, "S_W, M_W, H_W, S_T, M_T or H_T");
  gr->add_option("--n", spec.n, "Customers (1..99)");
  gr->add_option("--seed", spec.seed, "Generator seed");
  gr->add_option("--machines", spec.machines, "Machines per vehicle")->check(CLI::PositiveNumber);
  gr->add_option("--out-dir", real_out_dir, "Directory for <scenario>_<n>_<seed>.json");

  std::string fleet_instance;
  auto* fs = app.add_subcommand("fleet-size", "Greedy sequential fleet size");
  fs->add_option("--instance", fleet_instance, "Instance file")->required();

  std::string mip_instance, mip_variant = "mop", mip_out;
  auto* em = app.add_subcommand("export-mip", "Write the MIP model in LP format");
  em->add_option("--instance", mip_instance, "Instance file")->required();
  em->add_option("--variant", mip_variant, "mop or cp")->check(CLI::IsMember({"mop", "cp"}));
  em->add_option("--out", mip_out, "Output .lp path (default stdout)");

  CostInputs cost_in;
  std::string cost_table, cost_out;
  std::vector<std::string> solve_csvs;
  int machines_per_vehicle = 1;
  auto* c = app.add_subcommand("cost", "Long-term cost estimate");
  auto* travel_opt = c->add_option("--avg-travel", cost_in.avg_travel_per_day, "Average miles per day");
  auto* veh_opt = c->add_option("--avg-vehicles", cost_in.avg_vehicles, "Average vehicles per day");
  auto* fleet_opt = c->add_option("--fleet", cost_in.fleet_to_buy, "Vehicles to buy");
  auto* printers_opt = c->add_option("--printers", cost_in.printers_to_buy, "Printers to buy");
  c->add_option("--customers", cost_in.n_customers, "Orders per day")->required();
  c->add_option("--machines", machines_per_vehicle, "Printers per vehicle when --printers is omitted");
  c->add_option("--solve-csv", solve_csvs, "Solve CSVs to average travel and vehicles from");
  c->add_option("--table", cost_table, "Cost table JSON overriding the defaults");
  c->add_option("--out-csv", cost_out, "CSV output path (default stdout)");

  std::vector<std::string> argv_store{"mopvrp"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (s->parsed()) return do_solve(solve, out, err);
    if (o->parsed()) {
      if (co->count() > 0) oracle.compare_objective = compare_objective;
      if (ref->count() > 0) oracle.reference = reference;
      return do_oracle(oracle, out);
    }
    if (gb->parsed()) {
      const Instance base = load_instance(solomon_path);
      const Instance inst =
          derive_benchmark(base, mu, bench_machines, parse_variant(bench_variant), epsilon);
      emit(bench_out, write_instance_json(inst), out);
      return 0;
    }
    if (gr->parsed()) {
      const ScenarioSpec parsed = parse_scenario(scenario);
      spec.production_class = parsed.production_class;
      spec.window_class = parsed.window_class;
      const Instance inst = gen_realistic(spec);
      const std::string path = real_out_dir + "/" + spec.file_stem() + ".json";
      write_text_file(path, write_instance_json(inst));
      out << path << "\n";
      return 0;
    }
    if (fs->parsed()) {
      const Instance inst = load_instance(fleet_instance);
      const FleetSize fleet = fleet_size(inst);
      out << "instance,vehicles,unroutable\n" << inst.id << "," << fleet.vehicles << ",";
      for (std::size_t i = 0; i < fleet.unroutable.size(); ++i) {
        out << (i ? " " : "") << fleet.unroutable[i];
      }
      out << "\n";
      return fleet.unroutable.empty() ? 0 : 3;
    }
    if (em->parsed()) {
      const Instance inst = load_instance(mip_instance);
      emit(mip_out, export_mip(inst, parse_variant(mip_variant)), out);
      return 0;
    }
    if (c->parsed()) {
      if (!solve_csvs.empty()) {
        const SolveSummary sum = summarize_solve_csvs(solve_csvs);
        if (travel_opt->count() == 0) cost_in.avg_travel_per_day = sum.avg_travel;
        if (veh_opt->count() == 0) cost_in.avg_vehicles = sum.avg_vehicles;
        if (fleet_opt->count() == 0) cost_in.fleet_to_buy = sum.max_vehicles;
      } else if (travel_opt->count() == 0 || veh_opt->count() == 0 || fleet_opt->count() == 0) {
        throw InputError("cost needs --avg-travel, --avg-vehicles and --fleet, or --solve-csv");
      }
      if (printers_opt->count() == 0) cost_in.printers_to_buy = cost_in.fleet_to_buy * machines_per_vehicle;
      const CostTable table = cost_table.empty() ? CostTable{} : read_cost_table_json(read_text_file(cost_table));
      std::ostringstream csv;
      write_cost_csv(csv, cost_in, estimate(cost_in, table));
      emit(cost_out, csv.str(), out);
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace mopvrp::cli
