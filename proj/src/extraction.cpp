#include "procure/extraction.hpp"

#include <stdexcept>

namespace procure {

Units ExtractionResult::units() const {
  Units total = 0;
  for (const auto& w : winners) total += w.units;
  return total;
}

ExtractionResult extract_profit(std::span<const Bid> bids, const RevenueCurve& curve, Money target) {
  if (!unit_capacity(bids)) {
    throw std::invalid_argument("extract_profit: unit capacities required (use extract_profit_capacitated)");
  }
  return extract_profit_capacitated(bids, curve, target);
}

ExtractionResult extract_profit_capacitated(std::span<const Bid> bids, const RevenueCurve& curve, Money target) {
  if (target < 0.0) throw std::invalid_argument("profit target must be non-negative");
  const auto order = sorted_order(bids);

  // Cumulative supply through each rank, so the seller supplying unit k' is
  // found while scanning downward.
  std::vector<Units> through(order.size());
  Units m = 0;
  for (std::size_t r = 0; r < order.size(); ++r) through[r] = (m += bids[order[r]].capacity);

  // (R(k') - P) / k' is not monotone for concave R, so no early exit on the
  // way up: the first hit scanning down from m is the largest qualifier.
  std::size_t rank = order.size();
  for (Units k = m; k >= 1; --k) {
    while (rank > 1 && through[rank - 2] >= k) --rank;
    const std::size_t r = rank - 1;  // supplies unit k
    const Money price = (curve(k) - target) / static_cast<Money>(k);
    if (!at_most(bids[order[r]].valuation, price)) continue;

    ExtractionResult out;
    out.price_per_unit = price;
    Units before = 0;
    for (std::size_t i = 0; i <= r; ++i) {
      const Bid& b = bids[order[i]];
      const Units take = (i < r) ? b.capacity : k - before;
      out.winners.push_back(Award{order[i], b.id, take});
      before += take;
    }
    out.profit = curve(k) - price * static_cast<Money>(k);
    return out;
  }
  return {};
}

AuctionOutcome to_outcome(const ExtractionResult& result, std::span<const Bid> bids, const RevenueCurve& curve) {
  auto out = AuctionOutcome::empty(bids.size());
  for (const auto& w : result.winners) {
    out.allocation[w.index] = w.units;
    out.payment_per_unit[w.index] = result.price_per_unit;
  }
  out.profit = recompute_profit(out, curve);
  return out;
}

}  // namespace procure
