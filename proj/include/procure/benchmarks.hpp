#pragma once

#include <optional>
#include <span>

#include "procure/core.hpp"

namespace procure {

/// Profit of an omniscient auction together with the procurement it makes.
/// `price` is the uniform per-unit price (OPP) and is only set by the
/// single-price benchmarks when they trade.
struct BenchmarkResult {
  Money profit = 0.0;
  std::size_t winners = 0;
  Units units = 0;
  std::optional<Money> price;
};

// All benchmarks scan unit counts in valuation order and, on ties, report
// the smallest unit count.

/// F: max over i in 0..m of R(i) - i * v(i), where v(i) is the valuation of
/// the seller supplying the i-th cheapest unit. An empty bid list gives 0.
BenchmarkResult optimal_single_price(std::span<const Bid> bids, const RevenueCurve& curve);

/// T: every winner is paid their own valuation; units are filled cheapest first.
BenchmarkResult optimal_multi_price(std::span<const Bid> bids, const RevenueCurve& curve);

/// F^(2): F restricted to unit counts strictly above the cheapest seller's
/// capacity, i.e. at least two winning sellers. Throws BenchmarkInvalid for
/// fewer than two bids. The result may be negative.
BenchmarkResult optimal_single_price_min2(std::span<const Bid> bids, const RevenueCurve& curve);

inline BenchmarkResult optimal_single_price(const Instance& inst) {
  return optimal_single_price(inst.bids(), inst.curve());
}
inline BenchmarkResult optimal_multi_price(const Instance& inst) {
  return optimal_multi_price(inst.bids(), inst.curve());
}
inline BenchmarkResult optimal_single_price_min2(const Instance& inst) {
  return optimal_single_price_min2(inst.bids(), inst.curve());
}

/// Expected PEPA profit over F^(2) when F^(2) buys from k sellers with equal
/// margins under a linear curve: 1/2 - C(k-1, floor(k/2)) 2^-k. Requires k >= 2.
double exact_pepa_ratio(int k);

/// H_n = 1 + 1/2 + ... + 1/n
double harmonic_number(std::size_t n);

}  // namespace procure
