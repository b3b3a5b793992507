#include "procure/benchmarks.hpp"

#include <cmath>
#include <stdexcept>

namespace procure {

namespace {

// Walks units in valuation order. `visit(i, seller_pos, rank)` is called for
// i = 1..m with the position of the seller supplying unit i and that seller's
// rank (1-based) in the sorted order.
template <typename Visit>
void for_each_unit(std::span<const Bid> bids, const std::vector<std::size_t>& order, Visit&& visit) {
  Units i = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const Bid& b = bids[order[rank]];
    for (Units u = 0; u < b.capacity; ++u) visit(++i, order[rank], rank + 1);
  }
}

BenchmarkResult single_price_scan(std::span<const Bid> bids, const RevenueCurve& curve, Units min_units,
                                  bool allow_no_trade) {
  const auto order = sorted_order(bids);
  std::optional<BenchmarkResult> best;
  if (allow_no_trade) best = BenchmarkResult{};
  for_each_unit(bids, order, [&](Units i, std::size_t pos, std::size_t rank) {
    if (i < min_units) return;
    const Money v = bids[pos].valuation;
    const Money profit = curve(i) - static_cast<Money>(i) * v;
    if (!best || profit > best->profit) best = BenchmarkResult{profit, rank, i, v};
  });
  return best.value_or(BenchmarkResult{});
}

}  // namespace

BenchmarkResult optimal_single_price(std::span<const Bid> bids, const RevenueCurve& curve) {
  return single_price_scan(bids, curve, 1, true);
}

BenchmarkResult optimal_multi_price(std::span<const Bid> bids, const RevenueCurve& curve) {
  const auto order = sorted_order(bids);
  BenchmarkResult best;
  Money cost = 0.0;
  for_each_unit(bids, order, [&](Units i, std::size_t pos, std::size_t rank) {
    cost += bids[pos].valuation;
    const Money profit = curve(i) - cost;
    if (profit > best.profit) best = BenchmarkResult{profit, rank, i, std::nullopt};
  });
  return best;
}

BenchmarkResult optimal_single_price_min2(std::span<const Bid> bids, const RevenueCurve& curve) {
  if (bids.size() < 2) {
    throw BenchmarkInvalid("F^(2) is undefined for fewer than two bidders (got " + std::to_string(bids.size()) + ")");
  }
  const auto order = sorted_order(bids);
  return single_price_scan(bids, curve, bids[order.front()].capacity + 1, false);
}

double exact_pepa_ratio(int k) {
  if (k < 2) throw std::domain_error("exact_pepa_ratio: k must be at least 2");
  // C(k-1, j) 2^-k, accumulated as a product of ratios to stay in range.
  const int j = k / 2;
  long double term = std::ldexp(1.0L, -k);
  for (int i = 1; i <= j; ++i) {
    term *= static_cast<long double>(k - 1 - j + i) / static_cast<long double>(i);
  }
  return static_cast<double>(0.5L - term);
}

double harmonic_number(std::size_t n) {
  double h = 0.0;
  for (std::size_t i = n; i >= 1; --i) h += 1.0 / static_cast<double>(i);
  return h;
}

}  // namespace procure
