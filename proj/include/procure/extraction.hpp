#pragma once

#include <span>
#include <vector>

#include "procure/core.hpp"

namespace procure {

struct Award {
  std::size_t index = 0;   // position in the bid span passed to the extractor
  std::size_t seller = 0;  // Bid::id
  Units units = 0;
};

/// Result of a profit extractor: a prefix of the cheapest sellers, all paid
/// the same per-unit price.
struct ExtractionResult {
  std::vector<Award> winners;
  Money price_per_unit = 0.0;
  Money profit = 0.0;

  bool traded() const { return !winners.empty(); }
  Units units() const;
};

/// Unit-capacity profit extraction: the largest k with v[k] <= (R(k) - P) / k
/// buys from the k cheapest sellers at that price. Requires unit capacities.
ExtractionResult extract_profit(std::span<const Bid> bids, const RevenueCurve& curve, Money target);

/// Capacitated profit extraction: the largest unit count k' whose supplying
/// seller has v <= (R(k') - P) / k'. Sellers before it sell full capacity and
/// the supplying seller sells the remainder.
ExtractionResult extract_profit_capacitated(std::span<const Bid> bids, const RevenueCurve& curve, Money target);

inline ExtractionResult extract_profit(const Instance& inst, Money target) {
  return extract_profit(inst.bids(), inst.curve(), target);
}
inline ExtractionResult extract_profit_capacitated(const Instance& inst, Money target) {
  return extract_profit_capacitated(inst.bids(), inst.curve(), target);
}

/// Spreads an extraction over a full outcome vector of size `bids.size()`.
AuctionOutcome to_outcome(const ExtractionResult& result, std::span<const Bid> bids, const RevenueCurve& curve);

}  // namespace procure
