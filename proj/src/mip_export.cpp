#include <algorithm>
#include <charconv>
#include <stdexcept>
#include <string>
#include <vector>

#include "mopvrp/oracle.hpp"

namespace mopvrp {

namespace {

// Node ids in the exported graph: o and d are the depot copies.
constexpr int kOrigin = -1;
constexpr int kSink = -2;

std::string node_name(int v) {
  if (v == kOrigin) return "o";
  if (v == kSink) return "d";
  return std::to_string(v);
}

std::string number(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

struct Arc {
  int from;
  int to;
};

struct Term {
  double coef;
  std::string var;
};

class LpWriter {
 public:
  void comment(const std::string& text) { rows_ += "\\ " + text + "\n"; }

  void row(const std::string& name, const std::vector<Term>& terms, const char* sense,
           double rhs) {
    if (terms.empty()) {
      // Only arises on empty instances, where every such row reads 0 <= rhs etc.
      const bool holds = sense[0] == '<' ? 0.0 <= rhs : sense[0] == '>' ? 0.0 >= rhs : rhs == 0.0;
      if (!holds) throw std::logic_error("unsatisfiable empty row " + name);
      return;
    }
    rows_ += " " + name + ":" + render(terms) + " " + sense + " " + number(rhs) + "\n";
  }

  void objective(const std::vector<Term>& terms) { objective_ = " obj:" + render(terms) + "\n"; }

  void binary(const std::string& var) { binaries_.push_back(var); }
  void bound(const std::string& line) { bounds_.push_back(line); }

  std::string str(const std::string& title) const {
    std::string out = "\\ " + title + "\n";
    out += "Minimize\n" + objective_;
    out += "Subject To\n" + rows_;
    out += "Bounds\n";
    for (const auto& b : bounds_) out += " " + b + "\n";
    out += "Binaries\n";
    for (const auto& b : binaries_) out += " " + b + "\n";
    out += "End\n";
    return out;
  }

 private:
  static std::string render(const std::vector<Term>& terms) {
    std::string out;
    for (const auto& t : terms) {
      out += t.coef < 0 ? " - " : " + ";
      const double mag = t.coef < 0 ? -t.coef : t.coef;
      if (mag != 1.0) out += number(mag) + " ";
      out += t.var;
    }
    return out;
  }

  std::string objective_;
  std::string rows_;
  std::vector<std::string> bounds_;
  std::vector<std::string> binaries_;
};

class MipBuilder {
 public:
  MipBuilder(const Instance& inst, Variant variant) : inst_(inst), variant_(variant) {
    n_ = inst.num_customers();
    kappa_ = inst.num_vehicles;
    machines_ = variant == Variant::Mop ? inst.machines_per_vehicle : inst.num_depot_machines();
    for (int j = 1; j <= n_; ++j) arcs_.push_back({kOrigin, j});
    for (int i = 1; i <= n_; ++i) {
      for (int j = 1; j <= n_; ++j) {
        if (i != j) arcs_.push_back({i, j});
      }
    }
    for (int i = 1; i <= n_; ++i) arcs_.push_back({i, kSink});
    arcs_.push_back({kOrigin, kSink});

    double max_p = 0.0;
    for (const auto& c : inst.customers) max_p = std::max(max_p, c.production_time);
    double max_te = 0.0;
    for (const Arc& a : arcs_) max_te = std::max(max_te, travel_time(a) + service(a.from));
    big_m_ = inst.max_duration + std::max(max_p, max_te);
    // Production may start at -H at the depot; widen the constant accordingly.
    if (variant == Variant::Cp) big_m_ += inst.early_production;
  }

  std::string build() {
    const bool mop = variant_ == Variant::Mop;
    declare_variables();
    objective();
    shared_routing();
    if (mop) {
      mop_production();
    } else {
      cp_production();
    }
    timing();
    return lp_.str(std::string(mop ? "MoP" : "CP") + " model, instance " + inst_.id +
                   ", big M " + number(big_m_));
  }

 private:
  static std::size_t idx(int v) { return static_cast<std::size_t>(v); }
  static std::size_t matrix_node(int v) { return v < 0 ? 0 : idx(v); }

  double travel_time(const Arc& a) const {
    if (a.from == kOrigin && a.to == kSink) return 0.0;
    return inst_.time(matrix_node(a.from), matrix_node(a.to));
  }
  double distance(const Arc& a) const {
    if (a.from == kOrigin && a.to == kSink) return 0.0;
    return inst_.dist(matrix_node(a.from), matrix_node(a.to));
  }
  double service(int v) const { return v > 0 ? inst_.customer(v).service_time : 0.0; }
  double production(int v) const { return v > 0 ? inst_.customer(v).production_time : 0.0; }

  static std::string x(int k, const Arc& a) {
    return "x_" + std::to_string(k) + "_" + node_name(a.from) + "_" + node_name(a.to);
  }
  std::string w(int k, const Arc& a, int l) const {
    const std::string tail = node_name(a.from) + "_" + node_name(a.to) + "_" + std::to_string(l);
    return variant_ == Variant::Mop ? "w_" + std::to_string(k) + "_" + tail : "w_" + tail;
  }
  std::string v(int k, int node, int l) const {
    const std::string tail = node_name(node) + "_" + std::to_string(l);
    return variant_ == Variant::Mop ? "v_" + std::to_string(k) + "_" + tail : "v_" + tail;
  }
  static std::string s(int k, int node) { return "s_" + std::to_string(k) + "_" + node_name(node); }
  static std::string y(int i) { return "y_" + std::to_string(i); }

  std::vector<int> all_nodes() const {
    std::vector<int> nodes{kOrigin};
    for (int i = 1; i <= n_; ++i) nodes.push_back(i);
    nodes.push_back(kSink);
    return nodes;
  }

  void declare_variables() {
    const bool mop = variant_ == Variant::Mop;
    for (int k = 0; k < kappa_; ++k) {
      for (const Arc& a : arcs_) lp_.binary(x(k, a));
    }
    const int prod_copies = mop ? kappa_ : 1;
    for (int k = 0; k < prod_copies; ++k) {
      for (int l = 0; l < machines_; ++l) {
        for (const Arc& a : arcs_) lp_.binary(w(k, a, l));
      }
    }
    // s, y and MoP v keep the default [0, inf) bounds; CP v may go negative
    // and is bounded by explicit rows instead.
    if (!mop) {
      for (int l = 0; l < machines_; ++l) {
        for (int node : all_nodes()) lp_.bound(v(0, node, l) + " free");
      }
    }
  }

  void objective() {
    std::vector<Term> terms;
    for (int k = 0; k < kappa_; ++k) {
      for (const Arc& a : arcs_) {
        const double c = inst_.weights.travel * distance(a);
        if (c != 0.0) terms.push_back({c, x(k, a)});
      }
    }
    for (int i = 1; i <= n_; ++i) {
      terms.push_back({inst_.weights.delay, y(i)});
    }
    lp_.objective(terms);
  }

  std::vector<Term> out_arcs(int k, int node, double coef = 1.0) const {
    std::vector<Term> t;
    for (const Arc& a : arcs_) {
      if (a.from == node) t.push_back({coef, x(k, a)});
    }
    return t;
  }
  std::vector<Term> in_arcs(int k, int node, double coef = 1.0) const {
    std::vector<Term> t;
    for (const Arc& a : arcs_) {
      if (a.to == node) t.push_back({coef, x(k, a)});
    }
    return t;
  }

  static void append(std::vector<Term>& dst, const std::vector<Term>& src) {
    dst.insert(dst.end(), src.begin(), src.end());
  }

  void shared_routing() {
    lp_.comment("each customer is left exactly once");
    for (int i = 1; i <= n_; ++i) {
      std::vector<Term> t;
      for (int k = 0; k < kappa_; ++k) append(t, out_arcs(k, i));
      lp_.row("visit_" + std::to_string(i), t, "=", 1.0);
    }
    lp_.comment("every vehicle leaves o and reaches d once");
    for (int k = 0; k < kappa_; ++k) {
      lp_.row("start_" + std::to_string(k), out_arcs(k, kOrigin), "=", 1.0);
      lp_.row("end_" + std::to_string(k), in_arcs(k, kSink), "=", 1.0);
    }
    lp_.comment("route flow conservation");
    for (int k = 0; k < kappa_; ++k) {
      for (int i = 1; i <= n_; ++i) {
        auto t = out_arcs(k, i);
        append(t, in_arcs(k, i, -1.0));
        lp_.row("flow_" + std::to_string(k) + "_" + std::to_string(i), t, "=", 0.0);
      }
    }
    lp_.comment("capacity");
    for (int k = 0; k < kappa_; ++k) {
      std::vector<Term> t;
      for (int i = 1; i <= n_; ++i) {
        append(t, out_arcs(k, i, inst_.customer(i).demand));
      }
      lp_.row("cap_" + std::to_string(k), t, "<=", inst_.capacity);
    }
  }

  // w rows common to both models; k is ignored for CP.
  void production_chains(int k, const std::string& suffix) {
    for (int l = 0; l < machines_; ++l) {
      std::vector<Term> t;
      for (const Arc& a : arcs_) {
        if (a.from == kOrigin) t.push_back({1.0, w(k, a, l)});
      }
      lp_.row("prodstart" + suffix + "_" + std::to_string(l), t, "=", 1.0);
    }
    for (int i = 1; i <= n_; ++i) {
      for (int l = 0; l < machines_; ++l) {
        std::vector<Term> t;
        for (const Arc& a : arcs_) {
          if (a.from == i) t.push_back({1.0, w(k, a, l)});
          if (a.to == i) t.push_back({-1.0, w(k, a, l)});
        }
        lp_.row("prodflow" + suffix + "_" + std::to_string(i) + "_" + std::to_string(l), t, "=",
                0.0);
      }
    }
    for (const Arc& a : arcs_) {
      for (int l = 0; l < machines_; ++l) {
        // v_j - v_i - M w >= p_i - M
        lp_.row("prodseq" + suffix + "_" + node_name(a.from) + "_" + node_name(a.to) + "_" +
                    std::to_string(l),
                {{1.0, v(k, a.to, l)}, {-1.0, v(k, a.from, l)}, {-big_m_, w(k, a, l)}},
                ">=", production(a.from) - big_m_);
      }
    }
  }

  void mop_production() {
    lp_.comment("a visited customer is produced on one machine of its vehicle");
    for (int k = 0; k < kappa_; ++k) {
      for (int i = 1; i <= n_; ++i) {
        std::vector<Term> t;
        for (int l = 0; l < machines_; ++l) {
          for (const Arc& a : arcs_) {
            if (a.from == i) t.push_back({1.0, w(k, a, l)});
          }
        }
        append(t, out_arcs(k, i, -1.0));
        lp_.row("link_" + std::to_string(k) + "_" + std::to_string(i), t, "=", 0.0);
      }
    }
    lp_.comment("machine sequences on each vehicle");
    for (int k = 0; k < kappa_; ++k) production_chains(k, "_" + std::to_string(k));
    lp_.comment("delivery waits for production");
    for (int k = 0; k < kappa_; ++k) {
      for (int i = 1; i <= n_; ++i) {
        for (int l = 0; l < machines_; ++l) {
          lp_.row("prodserv_" + std::to_string(k) + "_" + std::to_string(i) + "_" +
                      std::to_string(l),
                  {{1.0, s(k, i)}, {-1.0, v(k, i, l)}}, ">=", production(i));
        }
      }
    }
  }

  void cp_production() {
    lp_.comment("each customer is produced on one depot machine");
    for (int i = 1; i <= n_; ++i) {
      std::vector<Term> t;
      for (int l = 0; l < machines_; ++l) {
        for (const Arc& a : arcs_) {
          if (a.from == i) t.push_back({1.0, w(0, a, l)});
        }
      }
      lp_.row("assign_" + std::to_string(i), t, "=", 1.0);
    }
    lp_.comment("depot machine sequences");
    production_chains(0, "");
    lp_.comment("a vehicle departs after all of its products are finished");
    for (int i = 1; i <= n_; ++i) {
      for (int l = 0; l < machines_; ++l) {
        for (int k = 0; k < kappa_; ++k) {
          // s_o - v_il - M sum_j x_ij >= p_i - M
          std::vector<Term> t{{1.0, s(k, kOrigin)}, {-1.0, v(0, i, l)}};
          append(t, out_arcs(k, i, -big_m_));
          lp_.row("depart_" + std::to_string(k) + "_" + std::to_string(i) + "_" +
                      std::to_string(l),
                  t, ">=", production(i) - big_m_);
        }
      }
    }
    lp_.comment("early production");
    for (int i = 1; i <= n_; ++i) {
      for (int l = 0; l < machines_; ++l) {
        lp_.row("early_" + std::to_string(i) + "_" + std::to_string(l), {{1.0, v(0, i, l)}},
                ">=", -inst_.early_production);
      }
    }
  }

  void timing() {
    lp_.comment("service times along routes");
    for (int k = 0; k < kappa_; ++k) {
      for (const Arc& a : arcs_) {
        // s_j - s_i - M x >= t_ij + e_i - M
        lp_.row("time_" + std::to_string(k) + "_" + node_name(a.from) + "_" + node_name(a.to),
                {{1.0, s(k, a.to)}, {-1.0, s(k, a.from)}, {-big_m_, x(k, a)}}, ">=",
                travel_time(a) + service(a.from) - big_m_);
      }
    }
    lp_.comment("window start, applied for every vehicle");
    for (int k = 0; k < kappa_; ++k) {
      for (int i = 1; i <= n_; ++i) {
        lp_.row("open_" + std::to_string(k) + "_" + std::to_string(i), {{1.0, s(k, i)}}, ">=",
                inst_.customer(i).tw_start);
      }
    }
    lp_.comment("latest return");
    for (int k = 0; k < kappa_; ++k) {
      lp_.row("dur_" + std::to_string(k), {{1.0, s(k, kSink)}}, "<=", inst_.max_duration);
    }
    lp_.comment("delay");
    for (int k = 0; k < kappa_; ++k) {
      for (int i = 1; i <= n_; ++i) {
        lp_.row("delay_" + std::to_string(k) + "_" + std::to_string(i),
                {{1.0, y(i)}, {-1.0, s(k, i)}}, ">=", -inst_.customer(i).tw_end);
      }
    }
  }

  const Instance& inst_;
  Variant variant_;
  int n_ = 0;
  int kappa_ = 0;
  int machines_ = 0;
  double big_m_ = 0.0;
  std::vector<Arc> arcs_;
  LpWriter lp_;
};

}  // namespace

std::string export_mip(const Instance& inst, Variant variant) {
  return MipBuilder(inst, variant).build();
}

}  // namespace mopvrp
