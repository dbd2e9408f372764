#include "reference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace mopvrp::ref {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTol = 1e-9;

std::size_t at(int i) { return static_cast<std::size_t>(i); }

// ---------------------------------------------------------------- simulator

enum class EventType { JobDone, Arrive, WindowOpen, Leave, DepotOpen };

struct Event {
  double time;
  long seq;
  EventType type;
  int vehicle;  // route index, or machine index for JobDone
  int customer;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

// One event loop serves both variants. Machines are flat: MoP machine l of
// vehicle k is machine k * m + l, CP depot machines are used as given.
class Simulator {
 public:
  Simulator(const Instance& inst, const std::vector<Route>& routes,
            const std::vector<std::vector<int>>& machines, double machine_origin, bool central)
      : inst_(inst), routes_(routes), machines_(machines), central_(central) {
    const std::size_t size = at(inst.num_customers()) + 1;
    ready_.assign(size, kInf);
    route_of_.assign(size, -1);
    pos_.assign(routes.size(), 0);
    waiting_.assign(routes.size(), false);
    pending_.assign(routes.size(), 0);
    out_.service_start.assign(size, std::nan(""));
    out_.departure.assign(routes.size(), 0.0);
    out_.ret.assign(routes.size(), 0.0);
    for (std::size_t r = 0; r < routes.size(); ++r) {
      for (int c : routes[r]) {
        route_of_[at(c)] = static_cast<int>(r);
        ++pending_[r];
      }
    }
    next_job_.assign(machines.size(), 0);
    for (std::size_t l = 0; l < machines.size(); ++l) {
      if (!machines[l].empty()) {
        const int c = machines[l][0];
        push(machine_origin + inst.customer(c).production_time, EventType::JobDone,
             static_cast<int>(l), c);
      }
    }
    for (std::size_t r = 0; r < routes.size(); ++r) {
      if (routes[r].empty()) continue;
      if (central) {
        push(0.0, EventType::DepotOpen, static_cast<int>(r), 0);
      } else {
        leave(static_cast<int>(r), 0.0);
      }
    }
  }

  Outcome run() {
    while (!queue_.empty()) {
      const Event e = queue_.top();
      queue_.pop();
      now_ = e.time;
      switch (e.type) {
        case EventType::JobDone: job_done(e.vehicle, e.customer); break;
        case EventType::Arrive: arrive(e.vehicle, e.customer); break;
        case EventType::WindowOpen: try_serve(e.vehicle); break;
        case EventType::Leave: leave(e.vehicle, now_); break;
        case EventType::DepotOpen: try_depart(e.vehicle); break;
      }
    }
    for (std::size_t r = 0; r < routes_.size(); ++r) {
      if (!routes_[r].empty() && pos_[r] < static_cast<int>(routes_[r].size()) + 1) {
        throw std::logic_error("simulation stalled: a product was never made");
      }
    }
    finish();
    return out_;
  }

 private:
  void push(double t, EventType type, int v, int c) { queue_.push({t, seq_++, type, v, c}); }

  void job_done(int machine, int c) {
    ready_[at(c)] = now_;
    auto& next = next_job_[at(machine)];
    ++next;
    const auto& jobs = machines_[at(machine)];
    if (next < static_cast<int>(jobs.size())) {
      const int d = jobs[at(next)];
      push(now_ + inst_.customer(d).production_time, EventType::JobDone, machine, d);
    }
    const int r = route_of_[at(c)];
    if (r < 0) return;
    if (central_) {
      --pending_[at(r)];
      try_depart(r);
    } else {
      try_serve(r);
    }
  }

  void try_depart(int r) {
    if (pending_[at(r)] != 0 || now_ < 0.0 || departed_.count(r)) return;
    departed_.insert(r);
    out_.departure[at(r)] = now_;
    leave(r, now_);
  }

  // The vehicle leaves its current stop (depot or customer) at time t.
  void leave(int r, double t) {
    const Route& route = routes_[at(r)];
    const int p = pos_[at(r)];
    const int from = p == 0 ? 0 : route[at(p - 1)];
    if (p < static_cast<int>(route.size())) {
      const int to = route[at(p)];
      push(t + inst_.time(at(from), at(to)), EventType::Arrive, r, to);
    } else {
      out_.ret[at(r)] = t + inst_.time(at(from), 0);
      pos_[at(r)] = p + 1;
    }
  }

  void arrive(int r, int c) {
    waiting_[at(r)] = true;
    const double open = inst_.customer(c).tw_start;
    if (open > now_) push(open, EventType::WindowOpen, r, c);
    try_serve(r);
  }

  void try_serve(int r) {
    if (!waiting_[at(r)]) return;
    const int c = routes_[at(r)][at(pos_[at(r)])];
    const Customer& cust = inst_.customer(c);
    if (now_ < cust.tw_start || ready_[at(c)] > now_) return;
    if (!central_ && ready_[at(c)] == kInf) return;
    waiting_[at(r)] = false;
    out_.service_start[at(c)] = now_;
    ++pos_[at(r)];
    push(now_ + cust.service_time, EventType::Leave, r, c);
  }

  void finish() {
    for (std::size_t r = 0; r < routes_.size(); ++r) {
      const Route& route = routes_[r];
      double load = 0.0;
      int prev = 0;
      for (int c : route) {
        out_.travel += inst_.dist(at(prev), at(c));
        out_.delay += std::max(0.0, out_.service_start[at(c)] - inst_.customer(c).tw_end);
        load += inst_.customer(c).demand;
        prev = c;
      }
      if (!route.empty()) out_.travel += inst_.dist(at(prev), 0);
      if (load > inst_.capacity + kTol) out_.feasible = false;
      if (!route.empty() && out_.ret[r] > inst_.max_duration + kTol) out_.feasible = false;
    }
    out_.objective = inst_.weights.travel * out_.travel + inst_.weights.delay * out_.delay;
  }

  const Instance& inst_;
  const std::vector<Route>& routes_;
  const std::vector<std::vector<int>>& machines_;
  bool central_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  long seq_ = 0;
  double now_ = 0.0;
  std::vector<double> ready_;
  std::vector<int> route_of_;
  std::vector<int> pos_;
  std::vector<bool> waiting_;
  std::vector<int> pending_;
  std::vector<int> next_job_;
  std::set<int> departed_;
  Outcome out_;
};

// ---------------------------------------------------------------- enumeration helpers

// Calls f(block_of) for every partition of 0..n-1 into at most `max_blocks`
// blocks, as restricted growth strings.
void for_each_partition(int n, int max_blocks, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> block(at(n), 0);
  std::function<void(int, int)> rec = [&](int i, int used) {
    if (i == n) {
      f(block);
      return;
    }
    for (int b = 0; b <= std::min(used, max_blocks - 1); ++b) {
      block[at(i)] = b;
      rec(i + 1, std::max(used, b + 1));
    }
  };
  if (n == 0) {
    f(block);
    return;
  }
  rec(0, 0);
}

std::vector<int> members(unsigned mask, int n) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (mask & (1u << i)) out.push_back(i + 1);
  }
  return out;
}

double mask_load(const Instance& inst, unsigned mask) {
  double load = 0.0;
  for (int c : members(mask, inst.num_customers())) load += inst.customer(c).demand;
  return load;
}

// Route walk from `departure` with per-customer earliest start `ready`.
// Returns the weighted cost, or +inf if the return exceeds D.
double walk(const Instance& inst, const std::vector<int>& order, double departure,
            const std::vector<double>& ready) {
  double clock = departure;
  int prev = 0;
  double travel = 0.0;
  double delay = 0.0;
  for (int c : order) {
    const Customer& cust = inst.customer(c);
    const double start = std::max({clock + inst.time(at(prev), at(c)), cust.tw_start, ready[at(c)]});
    delay += std::max(0.0, start - cust.tw_end);
    travel += inst.dist(at(prev), at(c));
    clock = start + cust.service_time;
    prev = c;
  }
  travel += inst.dist(at(prev), 0);
  clock += inst.time(at(prev), 0);
  if (clock > inst.max_duration + kTol) return kInf;
  return inst.weights.travel * travel + inst.weights.delay * delay;
}

}  // namespace

// ---------------------------------------------------------------- public

Outcome simulate_mop(const Instance& inst, const std::vector<Route>& routes,
                     const std::vector<std::vector<std::vector<int>>>& schedules) {
  const int m = inst.machines_per_vehicle;
  std::vector<std::vector<int>> flat(routes.size() * at(m));
  for (std::size_t k = 0; k < schedules.size(); ++k) {
    for (std::size_t l = 0; l < schedules[k].size(); ++l) flat[k * at(m) + l] = schedules[k][l];
  }
  return Simulator(inst, routes, flat, 0.0, /*central=*/false).run();
}

Outcome simulate_mop(const Instance& inst, const MopSolution& sol) {
  std::vector<std::vector<std::vector<int>>> schedules(sol.routes.size());
  for (std::size_t k = 0; k < sol.routes.size(); ++k) {
    schedules[k].assign(at(inst.machines_per_vehicle), {});
    for (int c : sol.routes[k]) schedules[k][at(sol.machine_of[at(c)])].push_back(c);
  }
  return simulate_mop(inst, sol.routes, schedules);
}

Outcome simulate_cp(const Instance& inst, const CpSolution& sol) {
  return Simulator(inst, sol.routes, sol.machine_jobs, -inst.early_production, /*central=*/true)
      .run();
}

double route_delay_at(const Instance& inst, const Route& route, double departure) {
  double clock = departure;
  int prev = 0;
  double delay = 0.0;
  for (int c : route) {
    const Customer& cust = inst.customer(c);
    const double start = std::max(clock + inst.time(at(prev), at(c)), cust.tw_start);
    delay += std::max(0.0, start - cust.tw_end);
    clock = start + cust.service_time;
    prev = c;
  }
  return delay;
}

double exhaustive_mop(const Instance& inst) {
  const int n = inst.num_customers();
  const int m = inst.machines_per_vehicle;
  const unsigned full = (1u << n) - 1;
  std::vector<double> block_best(at(n) == 0 ? 1 : (std::size_t{1} << n), kInf);
  block_best[0] = 0.0;

  std::vector<double> ready(at(n) + 1, 0.0);
  for (unsigned mask = 1; mask <= full; ++mask) {
    if (mask_load(inst, mask) > inst.capacity + kTol) continue;
    std::vector<int> order = members(mask, n);
    const int size = static_cast<int>(order.size());
    int labellings = 1;
    for (int i = 0; i < size; ++i) labellings *= m;
    double best = kInf;
    do {
      for (int code = 0; code < labellings; ++code) {
        std::vector<std::vector<int>> jobs(at(m));
        int rest = code;
        for (int c : order) {
          jobs[at(rest % m)].push_back(c);
          rest /= m;
        }
        for (auto& j : jobs) std::sort(j.begin(), j.end());
        // Every production order on every machine, machine by machine.
        std::function<void(int)> rec = [&](int l) {
          if (l == m) {
            best = std::min(best, walk(inst, order, 0.0, ready));
            return;
          }
          auto& mj = jobs[at(l)];
          do {
            double t = 0.0;
            for (int c : mj) {
              t += inst.customer(c).production_time;
              ready[at(c)] = t;
            }
            rec(l + 1);
          } while (std::next_permutation(mj.begin(), mj.end()));
        };
        rec(0);
      }
    } while (std::next_permutation(order.begin(), order.end()));
    block_best[mask] = best;
  }

  double best = kInf;
  for_each_partition(n, inst.num_vehicles, [&](const std::vector<int>& block) {
    std::vector<unsigned> masks(at(inst.num_vehicles), 0);
    for (int i = 0; i < n; ++i) masks[at(block[at(i)])] |= 1u << i;
    double total = 0.0;
    for (unsigned mk : masks) total += block_best[mk];
    best = std::min(best, total);
  });
  return best;
}

double exhaustive_cp(const Instance& inst) {
  const int n = inst.num_customers();
  const int depot_machines = inst.num_depot_machines();
  const double origin = -inst.early_production;

  std::vector<std::vector<unsigned>> partitions;
  for_each_partition(n, inst.num_vehicles, [&](const std::vector<int>& block) {
    std::vector<unsigned> masks(at(inst.num_vehicles), 0);
    for (int i = 0; i < n; ++i) masks[at(block[at(i)])] |= 1u << i;
    for (unsigned mk : masks) {
      if (mk != 0 && mask_load(inst, mk) > inst.capacity + kTol) return;
    }
    partitions.push_back(masks);
  });
  if (partitions.empty()) return kInf;

  const std::vector<double> no_wait(at(n) + 1, -kInf);
  std::map<std::pair<unsigned, double>, double> route_cache;
  auto route_best = [&](unsigned mask, double dep) {
    if (mask == 0) return 0.0;
    const auto key = std::make_pair(mask, dep);
    if (auto it = route_cache.find(key); it != route_cache.end()) return it->second;
    std::vector<int> order = members(mask, n);
    double best = kInf;
    do {
      best = std::min(best, walk(inst, order, dep, no_wait));
    } while (std::next_permutation(order.begin(), order.end()));
    route_cache.emplace(key, best);
    return best;
  };

  double best = kInf;
  std::vector<std::vector<int>> lists;
  std::vector<double> end(at(n) + 1, 0.0);
  auto evaluate = [&]() {
    for (const auto& list : lists) {
      double t = origin;
      for (int c : list) {
        t += inst.customer(c).production_time;
        end[at(c)] = t;
      }
    }
    for (const auto& masks : partitions) {
      double total = 0.0;
      for (unsigned mk : masks) {
        if (mk == 0) continue;
        double dep = 0.0;
        for (int c : members(mk, n)) dep = std::max(dep, end[at(c)]);
        total += route_best(mk, dep);
        if (total >= best) break;
      }
      best = std::min(best, total);
    }
  };
  // Jobs 1..n in turn either open a new machine list or go into any slot of
  // an existing list: every arrangement into unlabelled lists appears once.
  std::function<void(int)> place = [&](int c) {
    if (c > n) {
      evaluate();
      return;
    }
    for (std::size_t li = 0; li < lists.size(); ++li) {
      for (std::size_t slot = 0; slot <= lists[li].size(); ++slot) {
        lists[li].insert(lists[li].begin() + static_cast<std::ptrdiff_t>(slot), c);
        place(c + 1);
        lists[li].erase(lists[li].begin() + static_cast<std::ptrdiff_t>(slot));
      }
    }
    if (static_cast<int>(lists.size()) < depot_machines) {
      lists.push_back({c});
      place(c + 1);
      lists.pop_back();
    }
  };
  place(1);
  return best;
}

InsertionBest exhaustive_cp_insertion(const Instance& inst, const CpSolution& partial,
                                      int customer) {
  InsertionBest best;
  auto consider = [&](const CpSolution& cand) {
    const Outcome o = simulate_cp(inst, cand);
    if (!o.feasible) return;
    if (!best.found || o.objective < best.objective) {
      best.found = true;
      best.objective = o.objective;
    }
  };
  for (std::size_t r = 0; r < partial.routes.size(); ++r) {
    for (std::size_t pos = 0; pos <= partial.routes[r].size(); ++pos) {
      for (std::size_t l = 0; l < partial.machine_jobs.size(); ++l) {
        for (std::size_t nu = 0; nu <= partial.machine_jobs[l].size(); ++nu) {
          CpSolution cand = partial;
          auto& route = cand.routes[r];
          route.insert(route.begin() + static_cast<std::ptrdiff_t>(pos), customer);
          auto& jobs = cand.machine_jobs[l];
          jobs.insert(jobs.begin() + static_cast<std::ptrdiff_t>(nu), customer);
          consider(cand);

          // Pull the route's earlier jobs on this machine up to the new one.
          std::vector<int> earlier, others;
          for (std::size_t q = 0; q < nu; ++q) {
            const int c = jobs[q];
            const bool same = std::find(route.begin(), route.end(), c) != route.end();
            (same ? earlier : others).push_back(c);
          }
          if (earlier.empty()) continue;
          std::vector<int> moved = others;
          moved.insert(moved.end(), earlier.begin(), earlier.end());
          moved.insert(moved.end(), jobs.begin() + static_cast<std::ptrdiff_t>(nu), jobs.end());
          jobs = moved;
          consider(cand);
        }
      }
    }
  }
  return best;
}

Instance random_instance(std::mt19937_64& rng, const RandomShape& shape) {
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  Instance inst;
  inst.id = "rand";
  const int n = shape.n;
  std::vector<std::pair<double, double>> xy(at(n) + 1);
  xy[0] = {25.0, 25.0};
  for (int i = 1; i <= n; ++i) xy[at(i)] = {uni(0, 50), uni(0, 50)};
  inst.dist = Matrix(at(n) + 1);
  inst.time = Matrix(at(n) + 1);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      const double d = std::hypot(xy[at(i)].first - xy[at(j)].first, xy[at(i)].second - xy[at(j)].second);
      inst.dist(at(i), at(j)) = d;
      inst.time(at(i), at(j)) = d;
    }
  }
  double total_demand = 0.0;
  for (int i = 1; i <= n; ++i) {
    Customer c;
    c.id = i;
    c.demand = pick(1, 5);
    c.production_time = pick(1, 20);
    c.tw_start = pick(0, 80);
    c.tw_end = c.tw_start + pick(5, 40);
    c.service_time = pick(0, 5);
    total_demand += c.demand;
    inst.customers.push_back(c);
  }
  inst.num_vehicles = shape.vehicles;
  inst.machines_per_vehicle = shape.machines;
  inst.early_production = shape.early_production;
  // Capacity binds sometimes, never below the largest demand.
  inst.capacity = std::max(5.0, std::ceil(total_demand / shape.vehicles) + pick(0, 6));
  inst.max_duration = pick(120, 260);
  inst.weights = {1.0, static_cast<double>(pick(1, 3)) * 0.5};
  return inst;
}

MopSolution random_mop_solution(const Instance& inst, std::mt19937_64& rng) {
  MopSolution sol = MopSolution::empty(inst);
  std::vector<int> order(at(inst.num_customers()));
  std::iota(order.begin(), order.end(), 1);
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_int_distribution<int> route(0, inst.num_vehicles - 1);
  std::uniform_int_distribution<int> machine(0, inst.machines_per_vehicle - 1);
  for (int c : order) {
    sol.routes[at(route(rng))].push_back(c);
    sol.machine_of[at(c)] = machine(rng);
  }
  return sol;
}

CpSolution random_cp_solution(const Instance& inst, std::mt19937_64& rng, bool grouped) {
  CpSolution sol = CpSolution::empty(inst);
  std::vector<int> order(at(inst.num_customers()));
  std::iota(order.begin(), order.end(), 1);
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_int_distribution<int> route(0, inst.num_vehicles - 1);
  std::uniform_int_distribution<int> machine(0, inst.num_depot_machines() - 1);
  std::vector<int> route_of(at(inst.num_customers()) + 1, -1);
  for (int c : order) {
    const int r = route(rng);
    sol.routes[at(r)].push_back(c);
    route_of[at(c)] = r;
  }
  for (int c : order) sol.machine_jobs[at(machine(rng))].push_back(c);
  if (grouped) {
    // Random route order per machine, jobs kept in their drawn order within.
    for (auto& jobs : sol.machine_jobs) {
      std::vector<int> rank(at(inst.num_vehicles));
      std::iota(rank.begin(), rank.end(), 0);
      std::shuffle(rank.begin(), rank.end(), rng);
      std::stable_sort(jobs.begin(), jobs.end(), [&](int a, int b) {
        return rank[at(route_of[at(a)])] < rank[at(route_of[at(b)])];
      });
    }
  }
  return sol;
}

std::string synth_solomon(int n, std::uint64_t seed, const std::string& name,
                          SolomonStyle style) {
  std::mt19937_64 rng(seed);
  auto coord = [&] { return std::uniform_int_distribution<int>(0, 100)(rng); };
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::ostringstream os;
  os << name << "\n\nVEHICLE\nNUMBER     CAPACITY\n  25 " << std::setw(12) << style.capacity
     << "\n\nCUSTOMER\n"
     << "CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE TIME\n\n";
  const int depot_x = 35, depot_y = 35, horizon = 1000;
  char line[160];
  std::snprintf(line, sizeof line, "%5d %8d %8d %8d %8d %8d %8d\n", 0, depot_x, depot_y, 0, 0,
                horizon, 0);
  os << line;
  for (int i = 1; i <= n; ++i) {
    const int x = coord(), y = coord();
    const double back = std::hypot(x - depot_x, y - depot_y);
    const int latest = horizon - static_cast<int>(std::ceil(2.0 * back)) - 10;
    const int width = pick(style.width_min, style.width_max);
    const int ready = pick(0, std::max(0, latest - width));
    std::snprintf(line, sizeof line, "%5d %8d %8d %8d %8d %8d %8d\n", i, x, y, pick(1, 30), ready,
                  ready + width, 10);
    os << line;
  }
  return os.str();
}

}  // namespace mopvrp::ref
