#include "procure/mechanisms.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <stdexcept>

#include "procure/benchmarks.hpp"
#include "procure/extraction.hpp"

namespace procure {

PartitionDraw PartitionDraw::from_seed(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  PartitionDraw d{std::vector<bool>(n), seed};
  for (std::size_t i = 0; i < n; ++i) d.first_side[i] = (gen() >> 63) != 0;
  return d;
}

PartitionDraw PartitionDraw::from_mask(std::size_t n, std::uint64_t mask) {
  PartitionDraw d{std::vector<bool>(n), mask};
  for (std::size_t i = 0; i < n; ++i) d.first_side[i] = ((mask >> i) & 1U) != 0;
  return d;
}

namespace {

using Extractor = ExtractionResult (*)(std::span<const Bid>, const RevenueCurve&, Money);

MechanismRun run_partitioned(const Instance& inst, const PartitionDraw& draw, Extractor extract) {
  if (draw.first_side.size() != inst.size()) {
    throw std::invalid_argument("partition draw size does not match the number of bids");
  }
  const auto bids = inst.bids();
  const auto& curve = inst.curve();

  std::vector<Bid> side[2];
  std::vector<std::size_t> where[2];  // original positions
  for (std::size_t i = 0; i < bids.size(); ++i) {
    const int s = draw.first_side[i] ? 0 : 1;
    side[s].push_back(bids[i]);
    where[s].push_back(i);
  }

  MechanismRun run;
  run.partition = draw;
  run.f_prime = optimal_single_price(side[0], curve).profit;
  run.f_double_prime = optimal_single_price(side[1], curve).profit;

  const auto first = extract(side[0], curve, run.f_double_prime);
  const auto second = extract(side[1], curve, run.f_prime);
  const bool take_first = first.profit >= second.profit;
  run.chosen = take_first ? Side::first : Side::second;

  const auto& result = take_first ? first : second;
  const auto& positions = where[take_first ? 0 : 1];
  run.outcome = AuctionOutcome::empty(bids.size());
  for (const auto& w : result.winners) {
    run.outcome.allocation[positions[w.index]] = w.units;
    run.outcome.payment_per_unit[positions[w.index]] = result.price_per_unit;
  }
  run.outcome.profit = recompute_profit(run.outcome, curve);
  return run;
}

}  // namespace

MechanismRun run_pepa(const Instance& inst, const PartitionDraw& draw) {
  if (!inst.unit_capacity()) throw InvalidInput("pepa requires unit capacities; use pepac");
  return run_partitioned(inst, draw, [](std::span<const Bid> b, const RevenueCurve& c, Money p) {
    return extract_profit(b, c, p);
  });
}

MechanismRun run_pepa(const Instance& inst, std::uint64_t seed) {
  return run_pepa(inst, PartitionDraw::from_seed(inst.size(), seed));
}

MechanismRun run_pepac(const Instance& inst, const PartitionDraw& draw) {
  return run_partitioned(inst, draw, [](std::span<const Bid> b, const RevenueCurve& c, Money p) {
    return extract_profit_capacitated(b, c, p);
  });
}

MechanismRun run_pepac(const Instance& inst, std::uint64_t seed) {
  return run_pepac(inst, PartitionDraw::from_seed(inst.size(), seed));
}

AuctionOutcome run_bid_independent(const Instance& inst, const ThresholdFn& threshold) {
  const auto bids = inst.bids();
  const auto& curve = inst.curve();

  // Phase I
  std::vector<Bid> others;
  others.reserve(bids.size());
  std::vector<std::size_t> remaining;
  std::vector<Money> offer(bids.size(), 0.0);
  for (std::size_t i = 0; i < bids.size(); ++i) {
    others.clear();
    for (std::size_t j = 0; j < bids.size(); ++j) {
      if (j != i) others.push_back(bids[j]);
    }
    offer[i] = threshold(others, curve);
    if (at_most(bids[i].valuation, offer[i])) remaining.push_back(i);
  }

  // Phase II
  std::sort(remaining.begin(), remaining.end(), [&](std::size_t a, std::size_t b) {
    if (offer[a] != offer[b]) return offer[a] < offer[b];
    return bids[a].id < bids[b].id;
  });
  Units best_units = 0;
  Money best_profit = 0.0;
  Units i = 0;
  Money cost = 0.0;
  for (std::size_t pos : remaining) {
    for (Units u = 0; u < bids[pos].capacity; ++u) {
      ++i;
      cost += offer[pos];
      const Money profit = curve(i) - cost;
      if (profit > best_profit) {
        best_profit = profit;
        best_units = i;
      }
    }
  }

  auto out = AuctionOutcome::empty(bids.size());
  Units left = best_units;
  for (std::size_t pos : remaining) {
    if (left == 0) break;
    const Units take = std::min(left, bids[pos].capacity);
    out.allocation[pos] = take;
    out.payment_per_unit[pos] = offer[pos];
    left -= take;
  }
  out.profit = recompute_profit(out, curve);
  return out;
}

AuctionOutcome run_kth_price(const Instance& inst, Units demand_cap) {
  if (demand_cap < 0) throw std::invalid_argument("demand cap must be non-negative");
  const auto bids = inst.bids();
  const auto order = sorted_order(bids);

  auto out = AuctionOutcome::empty(bids.size());
  Units left = demand_cap;
  std::size_t r = 0;
  for (; r < order.size() && left > 0; ++r) {
    const Units take = std::min(left, bids[order[r]].capacity);
    out.allocation[order[r]] = take;
    left -= take;
  }
  if (r == order.size()) {
    throw UndefinedPrice("kth-price: every seller wins, so no losing valuation sets the price");
  }
  const Money price = bids[order[r]].valuation;
  for (std::size_t w = 0; w < r; ++w) out.payment_per_unit[order[w]] = price;
  out.profit = recompute_profit(out, inst.curve());
  return out;
}

namespace thresholds {

ThresholdFn posted(Money price) {
  return [price](std::span<const Bid>, const RevenueCurve&) { return price; };
}

ThresholdFn optimal_price() {
  return [](std::span<const Bid> others, const RevenueCurve& curve) {
    return optimal_single_price(others, curve).price.value_or(0.0);
  };
}

}  // namespace thresholds

Mechanism parse_mechanism(std::string_view name, std::optional<Units> demand_cap) {
  Mechanism m;
  m.name = std::string(name);
  if (name == "pepa") {
    m.kind = Mechanism::Kind::pepa;
  } else if (name == "pepac") {
    m.kind = Mechanism::Kind::pepac;
  } else if (name == "kth-price") {
    m.kind = Mechanism::Kind::kth_price;
    m.demand_cap = demand_cap;
  } else if (name.starts_with("bid-independent:")) {
    m.kind = Mechanism::Kind::bid_independent;
    const auto f = name.substr(std::string_view("bid-independent:").size());
    if (f == "opp") {
      m.threshold = thresholds::optimal_price();
    } else if (f.starts_with("posted=")) {
      const auto text = f.substr(7);
      double price = 0.0;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), price);
      if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(price) || price < 0.0) {
        throw UnknownMechanism("bad posted price in mechanism name '" + std::string(name) + "'");
      }
      m.threshold = thresholds::posted(price);
    } else {
      throw UnknownMechanism("unknown threshold function '" + std::string(f) + "' (known: opp, posted=<price>)");
    }
  } else {
    throw UnknownMechanism("unknown mechanism '" + std::string(name) +
                           "' (known: pepa, pepac, kth-price, bid-independent:<f>)");
  }
  return m;
}

AuctionOutcome run_mechanism(const Mechanism& mech, const Instance& inst, const PartitionDraw& draw) {
  switch (mech.kind) {
    case Mechanism::Kind::pepa:
      return run_pepa(inst, draw).outcome;
    case Mechanism::Kind::pepac:
      return run_pepac(inst, draw).outcome;
    case Mechanism::Kind::kth_price: {
      if (mech.demand_cap) return run_kth_price(inst, *mech.demand_cap);
      if (inst.curve().kind() == RevenueCurve::Kind::capped_linear) return run_kth_price(inst, inst.curve().cap());
      throw InvalidInput("kth-price needs a demand cap (pass one, or use a capped curve)");
    }
    case Mechanism::Kind::bid_independent:
      return run_bid_independent(inst, mech.threshold);
  }
  throw UnknownMechanism(mech.name);
}

}  // namespace procure
