#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "procure/benchmarks.hpp"
#include "procure/generators.hpp"
#include "procure/mechanisms.hpp"
#include "support.hpp"

using namespace procure;

namespace {

Instance unit(std::vector<Money> v, RevenueCurve c) { return Instance(make_bids(v), std::move(c)); }

Money average_over_masks(const Instance& inst, bool capacitated) {
  const std::uint64_t count = std::uint64_t{1} << inst.size();
  Money sum = 0.0;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    const auto draw = PartitionDraw::from_mask(inst.size(), mask);
    sum += (capacitated ? run_pepac(inst, draw) : run_pepa(inst, draw)).outcome.profit;
  }
  return sum / static_cast<Money>(count);
}

}  // namespace

TEST_CASE("partition draws") {
  const auto a = PartitionDraw::from_seed(50, 42);
  CHECK(a == PartitionDraw::from_seed(50, 42));
  CHECK_FALSE(a == PartitionDraw::from_seed(50, 43));
  CHECK(a.first_side.size() == 50);
  CHECK(a.seed == 42);

  const auto m = PartitionDraw::from_mask(4, 0b0101);
  CHECK(m.first_side == std::vector<bool>{true, false, true, false});
}

TEST_CASE("PEPA on the tightness instance") {
  const auto inst = unit({9, 10, 1000, 1000}, RevenueCurve::linear(20));
  CHECK(average_over_masks(inst, false) == 5.0);

  // The two cheap bids split: one side has F = 10, the other F = 0 or 10.
  const auto split = run_pepa(inst, PartitionDraw::from_mask(4, 0b0001));
  CHECK(split.f_prime == 11.0);
  CHECK(split.f_double_prime == 10.0);
  CHECK(split.outcome.profit == doctest::Approx(10.0));
  CHECK(split.chosen == Side::first);
}

TEST_CASE("PEPA expectation on the example 1 instance matches partition enumeration") {
  const auto inst = unit({1, 9, 10, 10}, RevenueCurve::linear(10));
  CHECK(average_over_masks(inst, false) == doctest::Approx(oracle::partition_expectation(inst.bids(), inst.curve())));
}

TEST_CASE("PEPA with a single bid earns nothing") {
  const auto inst = unit({3}, RevenueCurve::linear(10));
  for (std::uint64_t seed = 0; seed < 20; ++seed) CHECK(run_pepa(inst, seed).outcome.profit == 0.0);
}

TEST_CASE("PEPA rejects capacitated instances") {
  const std::vector<Money> v{1, 2};
  const std::vector<Units> q{1, 2};
  CHECK_THROWS_AS(run_pepa(Instance(make_bids(v, q), RevenueCurve::linear(5)), 1), InvalidInput);
}

TEST_CASE("profit is min(F', F'') on every partition") {
  testing_support::Gen gen(3);
  for (bool capacitated : {false, true}) {
    testing_support::InstanceShape shape;
    shape.max_n = 10;
    shape.max_q = capacitated ? 4 : 1;
    for (int trial = 0; trial < 40; ++trial) {
      const auto inst = gen.instance(shape);
      const std::uint64_t count = std::uint64_t{1} << inst.size();
      for (std::uint64_t mask = 0; mask < count; ++mask) {
        const auto draw = PartitionDraw::from_mask(inst.size(), mask);
        const auto run = capacitated ? run_pepac(inst, draw) : run_pepa(inst, draw);
        const Money expected = std::min(run.f_prime, run.f_double_prime);
        CHECK(std::abs(run.outcome.profit - expected) <= 1e-9 * (1.0 + expected));
        CHECK_FALSE(check_outcome(run.outcome, inst.bids(), inst.curve()).has_value());
      }
    }
  }
}

TEST_CASE("F' and F'' are the sides' benchmarks") {
  testing_support::Gen gen(8);
  testing_support::InstanceShape shape;
  shape.max_n = 9;
  shape.max_q = 3;
  shape.dyadic = true;
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = gen.instance(shape);
    const auto run = run_pepac(inst, gen.bits());
    std::vector<Bid> a, b;
    for (std::size_t i = 0; i < inst.size(); ++i) (run.partition.first_side[i] ? a : b).push_back(inst.bids()[i]);
    CHECK(run.f_prime == oracle::single_price(a, inst.curve()));
    CHECK(run.f_double_prime == oracle::single_price(b, inst.curve()));
    for (std::size_t i = 0; i < inst.size(); ++i) {
      const bool on_chosen = run.partition.first_side[i] == (run.chosen == Side::first);
      if (!on_chosen) CHECK(run.outcome.allocation[i] == 0);
    }
  }
}

TEST_CASE("PEPAC reduces to PEPA on unit capacities") {
  testing_support::Gen gen(4);
  testing_support::InstanceShape shape;
  shape.max_n = 12;
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = gen.instance(shape);
    const std::uint64_t seed = gen.bits();
    const auto a = run_pepa(inst, seed);
    const auto b = run_pepac(inst, seed);
    CHECK(a.partition == b.partition);
    CHECK(a.outcome.allocation == b.outcome.allocation);
    CHECK(a.outcome.payment_per_unit == b.outcome.payment_per_unit);
    CHECK(a.outcome.profit == b.outcome.profit);
  }
}

TEST_CASE("PEPAC on the kth-price demo instance") {
  const auto inst = generate("kth-price-demo");
  for (std::uint64_t seed = 0; seed < 32; ++seed) {
    const auto run = run_pepac(inst, seed);
    CHECK(run.outcome.profit >= 0.0);
    CHECK_FALSE(check_outcome(run.outcome, inst.bids(), inst.curve()).has_value());
  }
}

TEST_CASE("mechanism runs are deterministic") {
  testing_support::Gen gen(12);
  testing_support::InstanceShape shape;
  shape.max_q = 5;
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = gen.instance(shape);
    const std::uint64_t seed = gen.bits();
    const auto a = run_pepac(inst, seed);
    const auto b = run_pepac(inst, seed);
    CHECK(a.partition == b.partition);
    CHECK(a.f_prime == b.f_prime);
    CHECK(a.f_double_prime == b.f_double_prime);
    CHECK(a.chosen == b.chosen);
    CHECK(a.outcome.allocation == b.outcome.allocation);
    CHECK(a.outcome.payment_per_unit == b.outcome.payment_per_unit);
  }
}

TEST_CASE("bid-independent engine") {
  SUBCASE("posted price") {
    const auto inst = unit({1, 2, 3}, RevenueCurve::linear(10));
    const auto out = run_bid_independent(inst, thresholds::posted(5));
    CHECK(out.allocation == std::vector<Units>{1, 1, 1});
    CHECK(out.payment_per_unit == std::vector<Money>{5, 5, 5});
    CHECK(out.profit == 15.0);
  }
  SUBCASE("zero offer") {
    const auto out = run_bid_independent(unit({1, 2, 3}, RevenueCurve::linear(10)), thresholds::posted(0));
    CHECK(out.units() == 0);
    CHECK(out.profit == 0.0);
  }
  SUBCASE("posted price with capacities fills the marginal seller partially") {
    const std::vector<Money> v{1, 2};
    const std::vector<Units> q{2, 3};
    const auto out = run_bid_independent(Instance(make_bids(v, q), RevenueCurve::capped_linear(10, 3)),
                                         thresholds::posted(4));
    CHECK(out.allocation == std::vector<Units>{2, 1});
    CHECK(out.profit == 30.0 - 12.0);
  }
  SUBCASE("optimal price of the others") {
    const auto inst = unit({1, 9, 10, 10}, RevenueCurve::linear(10));
    const auto out = run_bid_independent(inst, thresholds::optimal_price());
    CHECK_FALSE(check_outcome(out, inst.bids(), inst.curve()).has_value());
    for (std::size_t i = 0; i < inst.size(); ++i) {
      Units previous = std::numeric_limits<Units>::max();
      for (int step = 0; step <= 40; ++step) {
        const Money v = 0.5 * step;
        const auto swept = run_bid_independent(inst.with_bid(i, v, 1), thresholds::optimal_price());
        CHECK(swept.allocation[i] <= previous);
        previous = swept.allocation[i];
      }
    }
  }
}

TEST_CASE("kth-price auction") {
  const auto demo = generate("kth-price-demo");
  const auto truthful = run_kth_price(demo, 200);
  CHECK(truthful.allocation == std::vector<Units>{100, 100, 0, 0});
  CHECK(truthful.payment_per_unit[1] == 10.0);
  CHECK(utility(truthful, 1, 8.0) == 200.0);

  const auto lie = run_kth_price(demo.with_bid(1, 8.0, 90), 200);
  CHECK(lie.allocation == std::vector<Units>{100, 90, 10, 0});
  CHECK(lie.payment_per_unit[1] == 12.0);
  CHECK(utility(lie, 1, 8.0) == 360.0);

  const auto tie = run_kth_price(unit({5, 5}, RevenueCurve::linear(10)), 1);
  CHECK(tie.allocation == std::vector<Units>{1, 0});
  CHECK(tie.payment_per_unit[0] == 5.0);

  CHECK_THROWS_AS(run_kth_price(unit({1, 2}, RevenueCurve::linear(10)), 5), UndefinedPrice);
}

TEST_CASE("individual rationality on random instances") {
  testing_support::Gen gen(77);
  testing_support::InstanceShape shape;
  shape.min_n = 2;
  shape.max_n = 10;
  shape.max_q = 4;
  const auto opp = parse_mechanism("bid-independent:opp");
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = gen.instance(shape);
    const auto run = run_pepac(inst, gen.bits());
    CHECK_FALSE(check_outcome(run.outcome, inst.bids(), inst.curve()).has_value());
    const auto bi = run_mechanism(opp, inst, run.partition);
    CHECK_FALSE(check_outcome(bi, inst.bids(), inst.curve()).has_value());
    const Units cap = gen.integer(1, std::max<Units>(1, inst.supply() - 1));
    try {
      const auto k = run_kth_price(inst, cap);
      CHECK_FALSE(check_outcome(k, inst.bids(), inst.curve()).has_value());
    } catch (const UndefinedPrice&) {
    }
  }
}

TEST_CASE("mechanism names") {
  CHECK(parse_mechanism("pepa").kind == Mechanism::Kind::pepa);
  CHECK(parse_mechanism("pepa").randomized());
  CHECK(parse_mechanism("pepac").kind == Mechanism::Kind::pepac);
  CHECK(parse_mechanism("kth-price").kind == Mechanism::Kind::kth_price);
  CHECK_FALSE(parse_mechanism("kth-price").randomized());
  CHECK(parse_mechanism("bid-independent:opp").kind == Mechanism::Kind::bid_independent);

  const auto posted = parse_mechanism("bid-independent:posted=3.5");
  const auto inst = unit({1, 4}, RevenueCurve::linear(10));
  CHECK(run_mechanism(posted, inst, PartitionDraw::from_seed(2, 0)).allocation == std::vector<Units>{1, 0});

  CHECK_THROWS_AS(parse_mechanism("vcg"), UnknownMechanism);
  CHECK_THROWS_AS(parse_mechanism("bid-independent:median"), UnknownMechanism);
  CHECK_THROWS_AS(parse_mechanism("bid-independent:posted=cheap"), UnknownMechanism);

  // Kth-price needs a demand cap; capped curves supply one.
  CHECK_THROWS_AS(run_mechanism(parse_mechanism("kth-price"), inst, PartitionDraw::from_seed(2, 0)), InvalidInput);
  const auto demo = generate("kth-price-demo");
  CHECK(run_mechanism(parse_mechanism("kth-price"), demo, PartitionDraw::from_seed(4, 0)).units() == 200);
}
