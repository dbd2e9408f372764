#include <gtest/gtest.h>

#include <cmath>

#include "mopvrp/instances.hpp"
#include "mopvrp/search.hpp"
#include "reference.hpp"

namespace mopvrp {
namespace {

const char* kTiny = R"(TINY

VEHICLE
NUMBER     CAPACITY
  3         20

CUSTOMER
CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE TIME

    0      40         50          0          0       230          0
    1      43         54          3         10        60         5
    2      40         60          2         20        80         5
)";

TEST(Solomon, ParsesFields) {
  const Instance inst = parse_solomon(kTiny);
  EXPECT_EQ(inst.id, "TINY");
  EXPECT_EQ(inst.num_customers(), 2);
  EXPECT_EQ(inst.num_vehicles, 3);
  EXPECT_DOUBLE_EQ(inst.capacity, 20.0);
  EXPECT_DOUBLE_EQ(inst.max_duration, 230.0);
  EXPECT_DOUBLE_EQ(inst.dist(0, 1), 5.0);
  EXPECT_DOUBLE_EQ(inst.time(0, 2), 10.0);
  EXPECT_EQ(inst.customer(2), (Customer{2, 2.0, 0.0, 20.0, 80.0, 5.0}));
}

TEST(Solomon, CrLfAndExplicitId) {
  std::string text = kTiny;
  std::string crlf;
  for (char c : text) {
    if (c == '\n') crlf += '\r';
    crlf += c;
  }
  EXPECT_EQ(parse_solomon(crlf, "given").id, "given");
}

TEST(Solomon, ErrorsCarryLineNumbers) {
  std::string bad = kTiny;
  bad.replace(bad.find("    2      40"), 13, "    5      40");
  try {
    parse_solomon(bad);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 12"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_solomon("NAME\n\nVEHICLE\n"), InputError);
  EXPECT_THROW(parse_solomon("NAME\nCUSTOMER\n"), InputError);
}

TEST(Benchmark, DerivesProductionFleetAndHorizon) {
  const Instance base = parse_solomon(kTiny);
  const Instance mop = derive_benchmark(base, 3.0, 2, Variant::Mop);
  EXPECT_DOUBLE_EQ(mop.customer(1).production_time, 9.0);
  EXPECT_DOUBLE_EQ(mop.customer(2).production_time, 6.0);
  EXPECT_EQ(mop.machines_per_vehicle, 2);
  EXPECT_EQ(mop.num_vehicles, fleet_size(mop).vehicles);
  EXPECT_DOUBLE_EQ(mop.early_production, 0.0);
  EXPECT_DOUBLE_EQ(mop.max_duration, 230.0);

  const Instance cp = derive_benchmark(base, 3.0, 2, Variant::Cp, 0.5);
  EXPECT_DOUBLE_EQ(cp.max_duration, 2300.0);
  EXPECT_DOUBLE_EQ(cp.early_production, 0.5 * 15.0 / (2 * cp.num_vehicles));
}

TEST(Benchmark, UnroutableCustomerIsAnError) {
  Instance base = parse_solomon(kTiny);
  base.customers[0].demand = 25.0;
  EXPECT_THROW(derive_benchmark(base, 1.0, 1, Variant::Mop), InputError);
}

TEST(Benchmark, SynthesizedSolomonTextParses) {
  const Instance inst = parse_solomon(ref::synth_solomon(50, 7, "SYN"));
  EXPECT_EQ(inst.num_customers(), 50);
  EXPECT_DOUBLE_EQ(inst.max_duration, 1000.0);
  EXPECT_NO_THROW(derive_benchmark(inst, 5.0, 1, Variant::Mop));
}

TEST(Realistic, DeterministicAndShaped) {
  ScenarioSpec spec = parse_scenario("H_T");
  spec.n = 25;
  spec.seed = 4;
  const Instance a = gen_realistic(spec);
  const Instance b = gen_realistic(spec);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.id, "H_T_25_4");
  EXPECT_EQ(a.num_customers(), 25);
  for (const auto& c : a.customers) {
    EXPECT_GE(c.production_time, 30.0);
    EXPECT_LE(c.production_time, 60.0);
    EXPECT_GE(c.tw_end - c.tw_start, 10.0);
    EXPECT_LE(c.tw_end - c.tw_start, 30.0);
    EXPECT_LE(c.tw_end, kRealisticHorizon);
    EXPECT_EQ(c.service_time, std::floor(c.service_time));
    EXPECT_DOUBLE_EQ(c.demand, 1.0);
  }
  EXPECT_DOUBLE_EQ(a.time(0, 1), a.dist(0, 1) * 1.2);
  EXPECT_DOUBLE_EQ(a.early_production, early_production_horizon(a, 0.75));
}

TEST(Realistic, SmallerSizesAreSubsets) {
  ScenarioSpec spec = parse_scenario("S_W");
  spec.seed = 2;
  spec.n = 99;
  const Instance full = gen_realistic(spec);
  spec.n = 25;
  const Instance part = gen_realistic(spec);
  for (const auto& c : part.customers) {
    bool found = false;
    for (const auto& f : full.customers) {
      found = found || (f.tw_start == c.tw_start && f.production_time == c.production_time);
    }
    EXPECT_TRUE(found);
  }
}

TEST(Realistic, RejectsBadScenario) {
  EXPECT_THROW(parse_scenario("X_W"), InputError);
  EXPECT_THROW(parse_scenario("S-W"), InputError);
  ScenarioSpec spec;
  spec.n = 100;
  EXPECT_THROW(gen_realistic(spec), InputError);
}

}  // namespace
}  // namespace mopvrp
