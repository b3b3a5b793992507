#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "procure/core.hpp"

namespace procure {

/// One fair coin per seller. Coins are drawn from std::mt19937_64 seeded
/// with `seed`, one 64-bit word per seller in position order; the top bit
/// set sends the seller to the first side (b').
struct PartitionDraw {
  std::vector<bool> first_side;
  std::uint64_t seed = 0;

  static PartitionDraw from_seed(std::size_t n, std::uint64_t seed);
  /// Bit i of `mask` set puts seller i on the first side. Used by exhaustive
  /// enumeration; `seed` is set to the mask.
  static PartitionDraw from_mask(std::size_t n, std::uint64_t mask);

  friend bool operator==(const PartitionDraw&, const PartitionDraw&) = default;
};

enum class Side { first, second };

struct MechanismRun {
  PartitionDraw partition;
  Money f_prime = 0.0;         // F of the first side
  Money f_double_prime = 0.0;  // F of the second side
  Side chosen = Side::first;
  AuctionOutcome outcome;
};

/// PEPA: random split, extract each side's optimal single-price profit from
/// the other side, keep the more profitable extraction (ties to the first
/// side). Requires unit capacities.
MechanismRun run_pepa(const Instance& inst, const PartitionDraw& draw);
MechanismRun run_pepa(const Instance& inst, std::uint64_t seed);

/// PEPAC: as PEPA with capacitated benchmark and extraction.
MechanismRun run_pepac(const Instance& inst, const PartitionDraw& draw);
MechanismRun run_pepac(const Instance& inst, std::uint64_t seed);

/// Threshold offered to a seller, computed from the other sellers' bids only.
using ThresholdFn = std::function<Money(std::span<const Bid> others, const RevenueCurve& curve)>;

/// Two-phase bid-independent auction. Phase I drops sellers whose threshold
/// is below their valuation; Phase II buys the profit-maximising number of
/// units from the rest in threshold order, paying each winner its threshold.
AuctionOutcome run_bid_independent(const Instance& inst, const ThresholdFn& threshold);

/// Uniform-price auction filling units cheapest first up to `demand_cap`,
/// paying every winner the valuation of the first losing seller. Throws
/// UndefinedPrice when nobody loses.
AuctionOutcome run_kth_price(const Instance& inst, Units demand_cap);

namespace thresholds {
/// Constant offer c.
ThresholdFn posted(Money price);
/// Optimal single price of the other bids (0 when they do not trade).
ThresholdFn optimal_price();
}  // namespace thresholds

/// A mechanism selected by name: "pepa", "pepac", "kth-price",
/// "bid-independent:opp" or "bid-independent:posted=<price>".
struct Mechanism {
  enum class Kind { pepa, pepac, kth_price, bid_independent };

  Kind kind = Kind::pepa;
  std::string name;
  ThresholdFn threshold;           // bid_independent only
  std::optional<Units> demand_cap; // kth_price only

  bool randomized() const { return kind == Kind::pepa || kind == Kind::pepac; }
};

/// Throws UnknownMechanism.
Mechanism parse_mechanism(std::string_view name, std::optional<Units> demand_cap = std::nullopt);

/// Runs `mech` under a fixed partition draw (ignored by deterministic
/// mechanisms). A Kth-price mechanism without an explicit demand cap uses
/// the saturation point of a capped curve and throws InvalidInput otherwise.
AuctionOutcome run_mechanism(const Mechanism& mech, const Instance& inst, const PartitionDraw& draw);

}  // namespace procure
