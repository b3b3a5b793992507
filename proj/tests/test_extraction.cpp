#include <doctest.h>

#include "procure/benchmarks.hpp"
#include "procure/extraction.hpp"
#include "support.hpp"

using namespace procure;

namespace {

Instance unit(std::vector<Money> v, RevenueCurve c) { return Instance(make_bids(v), std::move(c)); }

// Every qualifying unit count, checked independently of the downward scan.
Units largest_qualifying(const Instance& inst, Money target) {
  const auto order = sorted_order(inst.bids());
  std::vector<Money> unit_valuation;
  for (auto pos : order) {
    for (Units u = 0; u < inst.bids()[pos].capacity; ++u) unit_valuation.push_back(inst.bids()[pos].valuation);
  }
  Units best = 0;
  for (Units k = 1; k <= static_cast<Units>(unit_valuation.size()); ++k) {
    if (unit_valuation[k - 1] <= (inst.curve()(k) - target) / static_cast<Money>(k) + kTolerance) best = k;
  }
  return best;
}

}  // namespace

TEST_CASE("unit-capacity extraction") {
  const auto inst = unit({1, 9, 10, 10}, RevenueCurve::linear(10));

  const auto two = extract_profit(inst, 2.0);
  REQUIRE(two.winners.size() == 2);
  CHECK(two.winners[0].seller == 0);
  CHECK(two.winners[1].seller == 1);
  CHECK(two.price_per_unit == 9.0);
  CHECK(two.profit == 2.0);

  const auto none = extract_profit(inst, 12.0);
  CHECK_FALSE(none.traded());
  CHECK(none.profit == 0.0);

  // P = 0: largest k with v[k] <= R(k)/k = 10 is k = 4.
  const auto zero = extract_profit(inst, 0.0);
  CHECK(zero.winners.size() == 4);
  CHECK(zero.price_per_unit == 10.0);
  CHECK(zero.profit == 0.0);

  // P = F exactly succeeds at the optimal k.
  const auto at_f = extract_profit(inst, optimal_single_price(inst).profit);
  CHECK(at_f.traded());
  CHECK(at_f.profit == doctest::Approx(9.0));

  const std::vector<Money> v{1};
  const std::vector<Units> q{2};
  CHECK_THROWS_AS(extract_profit(Instance(make_bids(v, q), RevenueCurve::linear(10)), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(extract_profit(inst, -1.0), std::invalid_argument);
}

TEST_CASE("capacitated extraction") {
  {
    const std::vector<Money> v{1, 9, 10};
    const std::vector<Units> q{2, 1, 3};
    const Instance inst(make_bids(v, q), RevenueCurve::linear(10));
    const auto r = extract_profit_capacitated(inst, 2.0);
    REQUIRE(r.winners.size() == 2);
    CHECK(r.winners[0].seller == 0);
    CHECK(r.winners[0].units == 2);
    CHECK(r.winners[1].seller == 1);
    CHECK(r.winners[1].units == 1);
    CHECK(r.price_per_unit == doctest::Approx(28.0 / 3.0));
    CHECK(r.profit == doctest::Approx(2.0));
  }
  {
    const std::vector<Money> v{5};
    const std::vector<Units> q{3};
    const auto r = extract_profit_capacitated(Instance(make_bids(v, q), RevenueCurve::linear(4)), 10.0);
    CHECK_FALSE(r.traded());
    CHECK(r.profit == 0.0);
  }
  {
    // Marginal seller is partially filled.
    const std::vector<Money> v{1, 2};
    const std::vector<Units> q{1, 5};
    const Instance inst(make_bids(v, q), RevenueCurve::capped_linear(4, 3));
    // k' = 4: (12 - 3) / 4 = 2.25 covers the second seller's valuation.
    const auto r = extract_profit_capacitated(inst, 3.0);
    REQUIRE(r.winners.size() == 2);
    CHECK(r.winners[1].units == 3);
    CHECK(r.units() == 4);
    CHECK(r.price_per_unit == 2.25);
    CHECK(r.profit == 3.0);
  }
}

TEST_CASE("capacitated extraction degenerates to unit extraction") {
  testing_support::Gen gen(5);
  testing_support::InstanceShape shape;
  shape.max_n = 10;
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = gen.instance(shape);
    const Money p = gen.uniform(0.0, 20.0);
    const auto a = extract_profit(inst, p);
    const auto b = extract_profit_capacitated(inst, p);
    CHECK(a.price_per_unit == b.price_per_unit);
    CHECK(a.profit == b.profit);
    CHECK(a.units() == b.units());
  }
}

TEST_CASE("profit identity, IR and the largest qualifying unit count") {
  testing_support::Gen gen(17);
  testing_support::InstanceShape shape;
  shape.max_n = 10;
  shape.max_q = 4;
  for (int trial = 0; trial < 500; ++trial) {
    const auto inst = gen.instance(shape);
    const Money f = optimal_single_price(inst).profit;
    const Money target = gen.uniform(0.0, 1.5 * f);
    const auto r = extract_profit_capacitated(inst, target);
    CAPTURE(trial);
    if (target <= f) {
      if (target > 0.0) CHECK(r.traded());
      CHECK(std::abs(r.profit - target) <= 1e-9);
    } else {
      CHECK(r.profit == 0.0);
    }
    CHECK(r.units() == largest_qualifying(inst, target));
    for (const auto& w : r.winners) CHECK(at_most(inst.bids()[w.index].valuation, r.price_per_unit));
    const auto outcome = to_outcome(r, inst.bids(), inst.curve());
    CHECK_FALSE(check_outcome(outcome, inst.bids(), inst.curve()).has_value());
  }
}

TEST_CASE("a winner's price does not depend on its own bid") {
  testing_support::Gen gen(23);
  testing_support::InstanceShape shape;
  shape.min_n = 2;
  shape.max_n = 8;
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const auto inst = gen.instance(shape);
    const Money target = gen.uniform(0.0, optimal_single_price(inst).profit);
    const auto r = extract_profit(inst, target);
    if (!r.traded()) continue;
    const auto& w = r.winners[static_cast<std::size_t>(gen.integer(0, static_cast<std::int64_t>(r.winners.size()) - 1))];
    const Money raised = gen.uniform(inst.bids()[w.index].valuation, r.price_per_unit);
    const auto again = extract_profit(inst.with_bid(w.index, raised, 1), target);
    const bool still_wins = std::any_of(again.winners.begin(), again.winners.end(),
                                        [&](const Award& a) { return a.index == w.index; });
    if (!still_wins) continue;
    ++checked;
    CHECK(again.price_per_unit == doctest::Approx(r.price_per_unit));
  }
  CHECK(checked > 50);
}

TEST_CASE("capacity underbids do not pay under a linear curve") {
  testing_support::Gen gen(31);
  testing_support::InstanceShape shape;
  shape.max_n = 8;
  shape.max_q = 6;
  shape.curve = testing_support::InstanceShape::Curve::linear;
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = gen.instance(shape);
    const Money target = gen.uniform(0.0, optimal_single_price(inst).profit);
    const auto truthful = to_outcome(extract_profit_capacitated(inst, target), inst.bids(), inst.curve());
    for (std::size_t i = 0; i < inst.size(); ++i) {
      const Bid b = inst.bids()[i];
      for (Units q_hat = 1; q_hat < b.capacity; ++q_hat) {
        const auto dev = inst.with_bid(i, b.valuation, q_hat);
        const auto out = to_outcome(extract_profit_capacitated(dev, target), dev.bids(), dev.curve());
        CHECK(utility(out, i, b.valuation) <= utility(truthful, i, b.valuation) + 1e-9);
      }
    }
  }
}
