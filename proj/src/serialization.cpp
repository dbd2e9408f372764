#include "mopvrp/serialization.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace mopvrp {

using nlohmann::json;

namespace {

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
}

void require_fields(const json& j, const std::string& what, std::initializer_list<const char*> allowed,
                    std::initializer_list<const char*> required) {
  if (!j.is_object()) throw InputError(what + ": expected an object");
  const std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) throw InputError(what + ": unknown field '" + item.key() + "'");
  }
  for (const char* key : required) {
    if (!j.contains(key)) throw InputError(what + ": missing field '" + key + "'");
  }
}

void check_header(const json& j, const std::string& kind) {
  if (!j.is_object() || !j.contains("format") || !j.contains("kind")) {
    throw InputError("missing format/kind header");
  }
  if (j.at("format") != kFormatVersion) {
    throw InputError("unsupported format version " + j.at("format").dump() + " (expected " +
                     std::to_string(kFormatVersion) + ")");
  }
  if (j.at("kind") != kind) {
    throw InputError("expected kind '" + kind + "', got " + j.at("kind").dump());
  }
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("field '") + key + "': " + e.what());
  }
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.size(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from(const json& j, const char* key) {
  const auto rows = get<std::vector<std::vector<double>>>(j, key);
  Matrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) throw InputError(std::string(key) + ": matrix is not square");
    for (std::size_t k = 0; k < rows.size(); ++k) m(i, k) = rows[i][k];
  }
  return m;
}

void check_customer_ids(const std::vector<std::vector<int>>& lists, const Instance& inst,
                        const char* what) {
  for (const auto& list : lists) {
    for (int c : list) {
      if (c < 1 || c > inst.num_customers()) {
        throw InputError(std::string(what) + ": customer id " + std::to_string(c) + " out of range");
      }
    }
  }
}

}  // namespace

std::string write_instance_json(const Instance& inst) {
  json customers = json::array();
  for (const auto& c : inst.customers) {
    customers.push_back({{"id", c.id},
                         {"demand", c.demand},
                         {"production_time", c.production_time},
                         {"tw_start", c.tw_start},
                         {"tw_end", c.tw_end},
                         {"service_time", c.service_time}});
  }
  json j = {{"format", kFormatVersion},
            {"kind", "instance"},
            {"id", inst.id},
            {"num_vehicles", inst.num_vehicles},
            {"capacity", inst.capacity},
            {"max_duration", inst.max_duration},
            {"machines_per_vehicle", inst.machines_per_vehicle},
            {"early_production", inst.early_production},
            {"weights", {{"travel", inst.weights.travel}, {"delay", inst.weights.delay}}},
            {"customers", customers},
            {"dist", matrix_json(inst.dist)},
            {"time", matrix_json(inst.time)}};
  return j.dump(1) + "\n";
}

Instance read_instance_json(std::string_view text) {
  const json j = parse(text);
  check_header(j, "instance");
  require_fields(j, "instance",
                 {"format", "kind", "id", "num_vehicles", "capacity", "max_duration",
                  "machines_per_vehicle", "early_production", "weights", "customers", "dist",
                  "time"},
                 {"num_vehicles", "capacity", "max_duration", "machines_per_vehicle", "customers",
                  "dist", "time"});
  Instance inst;
  inst.id = j.contains("id") ? get<std::string>(j, "id") : "";
  inst.num_vehicles = get<int>(j, "num_vehicles");
  inst.capacity = get<double>(j, "capacity");
  inst.max_duration = get<double>(j, "max_duration");
  inst.machines_per_vehicle = get<int>(j, "machines_per_vehicle");
  inst.early_production = j.contains("early_production") ? get<double>(j, "early_production") : 0.0;
  if (j.contains("weights")) {
    const json& w = j.at("weights");
    require_fields(w, "weights", {"travel", "delay"}, {"travel", "delay"});
    inst.weights.travel = get<double>(w, "travel");
    inst.weights.delay = get<double>(w, "delay");
  }
  const json& customers = j.at("customers");
  if (!customers.is_array()) throw InputError("customers: expected an array");
  for (const auto& cj : customers) {
    require_fields(cj, "customer",
                   {"id", "demand", "production_time", "tw_start", "tw_end", "service_time"},
                   {"id", "demand", "production_time", "tw_start", "tw_end", "service_time"});
    Customer c;
    c.id = get<int>(cj, "id");
    c.demand = get<double>(cj, "demand");
    c.production_time = get<double>(cj, "production_time");
    c.tw_start = get<double>(cj, "tw_start");
    c.tw_end = get<double>(cj, "tw_end");
    c.service_time = get<double>(cj, "service_time");
    inst.customers.push_back(c);
  }
  inst.dist = matrix_from(j, "dist");
  inst.time = matrix_from(j, "time");
  validate_instance(inst);
  return inst;
}

std::string write_solution_json(const MopSolution& sol) {
  json machines = json::array();
  for (const auto& route : sol.routes) {
    json row = json::array();
    for (int c : route) row.push_back(sol.machine_of[static_cast<std::size_t>(c)]);
    machines.push_back(std::move(row));
  }
  json j = {{"format", kFormatVersion},
            {"kind", "mop_solution"},
            {"routes", sol.routes},
            {"machines", machines}};
  return j.dump() + "\n";
}

std::string write_solution_json(const CpSolution& sol) {
  json j = {{"format", kFormatVersion},
            {"kind", "cp_solution"},
            {"routes", sol.routes},
            {"machine_jobs", sol.machine_jobs}};
  return j.dump() + "\n";
}

MopSolution read_mop_solution_json(std::string_view text, const Instance& inst) {
  const json j = parse(text);
  check_header(j, "mop_solution");
  require_fields(j, "mop_solution", {"format", "kind", "routes", "machines"}, {"routes", "machines"});
  const auto routes = get<std::vector<std::vector<int>>>(j, "routes");
  const auto machines = get<std::vector<std::vector<int>>>(j, "machines");
  if (routes.size() != machines.size()) throw InputError("routes and machines differ in length");
  check_customer_ids(routes, inst, "routes");
  MopSolution sol;
  sol.routes = routes;
  sol.machine_of.assign(static_cast<std::size_t>(inst.num_customers()) + 1, -1);
  for (std::size_t r = 0; r < routes.size(); ++r) {
    if (routes[r].size() != machines[r].size()) {
      throw InputError("route " + std::to_string(r) + ": one machine per customer expected");
    }
    for (std::size_t k = 0; k < routes[r].size(); ++k) {
      sol.machine_of[static_cast<std::size_t>(routes[r][k])] = machines[r][k];
    }
  }
  return sol;
}

CpSolution read_cp_solution_json(std::string_view text, const Instance& inst) {
  const json j = parse(text);
  check_header(j, "cp_solution");
  require_fields(j, "cp_solution", {"format", "kind", "routes", "machine_jobs"},
                 {"routes", "machine_jobs"});
  CpSolution sol;
  sol.routes = get<std::vector<std::vector<int>>>(j, "routes");
  sol.machine_jobs = get<std::vector<std::vector<int>>>(j, "machine_jobs");
  check_customer_ids(sol.routes, inst, "routes");
  check_customer_ids(sol.machine_jobs, inst, "machine_jobs");
  return sol;
}

AlnsConfig read_config_json(std::string_view text, Variant variant) {
  const json j = parse(text);
  require_fields(j, "config",
                 {"n_max", "t_initial", "removal_range", "segment_length", "scores", "reaction",
                  "noise_level", "u_worst", "u_related", "rng_seed", "violation_penalty"},
                 {});
  AlnsConfig c = AlnsConfig::defaults(variant);
  if (j.contains("n_max")) c.n_max = get<int>(j, "n_max");
  if (j.contains("t_initial")) c.t_initial = get<double>(j, "t_initial");
  if (j.contains("removal_range")) {
    const auto range = get<std::vector<double>>(j, "removal_range");
    if (range.size() != 2) throw InputError("removal_range: expected [min, max]");
    c.removal_min = range[0];
    c.removal_max = range[1];
  }
  if (j.contains("segment_length")) c.segment_length = get<int>(j, "segment_length");
  if (j.contains("scores")) {
    const auto s = get<std::vector<double>>(j, "scores");
    if (s.size() != 3) throw InputError("scores: expected [best, better, accepted]");
    c.score_best = s[0];
    c.score_better = s[1];
    c.score_accepted = s[2];
  }
  if (j.contains("reaction")) c.reaction = get<double>(j, "reaction");
  if (j.contains("noise_level")) c.noise_level = get<double>(j, "noise_level");
  if (j.contains("u_worst")) c.u_worst = get<double>(j, "u_worst");
  if (j.contains("u_related")) c.u_related = get<double>(j, "u_related");
  if (j.contains("rng_seed")) c.rng_seed = get<std::uint64_t>(j, "rng_seed");
  if (j.contains("violation_penalty")) c.violation_penalty = get<double>(j, "violation_penalty");
  c.validate();
  return c;
}

std::string write_config_json(const AlnsConfig& c) {
  json j = {{"n_max", c.n_max},
            {"t_initial", c.t_initial},
            {"removal_range", {c.removal_min, c.removal_max}},
            {"segment_length", c.segment_length},
            {"scores", {c.score_best, c.score_better, c.score_accepted}},
            {"reaction", c.reaction},
            {"noise_level", c.noise_level},
            {"u_worst", c.u_worst},
            {"u_related", c.u_related},
            {"rng_seed", c.rng_seed},
            {"violation_penalty", c.violation_penalty}};
  return j.dump(1) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw InputError("write failed for '" + path + "'");
}

}  // namespace mopvrp
