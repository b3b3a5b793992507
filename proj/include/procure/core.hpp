#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace procure {

using Units = std::int64_t;
using Money = double;

/// Slack applied to every threshold comparison: `a <= b` is evaluated as
/// `a <= b + kTolerance`.
inline constexpr double kTolerance = 1e-9;

inline bool at_most(Money a, Money b) { return a <= b + kTolerance; }

// Error hierarchy. The CLI maps each class onto a fixed exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invariant-violating input (instance data, generator params).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class UnknownMechanism : public Error {
 public:
  using Error::Error;
};

/// A benchmark that is undefined or non-positive where a positive value is required.
class BenchmarkInvalid : public Error {
 public:
  using Error::Error;
};

/// Kth-price auction with no losing seller to set the price.
class UndefinedPrice : public Error {
 public:
  using Error::Error;
};

struct Bid {
  Money valuation = 0.0;  // per unit
  Units capacity = 1;
  std::size_t id = 0;

  friend bool operator==(const Bid&, const Bid&) = default;
};

/// Bids with ids 0..n-1. An empty capacity list means unit capacities.
std::vector<Bid> make_bids(std::span<const Money> valuations, std::span<const Units> capacities = {});

/// Positions of `bids` sorted by valuation ascending, ties by id ascending.
std::vector<std::size_t> sorted_order(std::span<const Bid> bids);

Units total_supply(std::span<const Bid> bids);
bool unit_capacity(std::span<const Bid> bids);

/// Buyer's resale revenue as a function of integer quantity. R(0) = 0 and
/// marginals are non-negative for every constructible curve; concavity is
/// certified separately by validate_curve().
class RevenueCurve {
 public:
  enum class Kind { linear, capped_linear, piecewise_linear };

  static RevenueCurve linear(Money rate);
  /// rate * min(q, cap)
  static RevenueCurve capped_linear(Money rate, Units cap);
  /// Breakpoints (q, R) with strictly increasing integer q, interpolated
  /// linearly between them and flat beyond the last one. (0, 0) is implied
  /// when absent.
  static RevenueCurve piecewise_linear(std::vector<std::pair<Units, Money>> points);

  Money operator()(Units q) const;

  Kind kind() const { return kind_; }
  Money rate() const { return rate_; }
  Units cap() const { return cap_; }
  const std::vector<std::pair<Units, Money>>& points() const { return points_; }

  friend bool operator==(const RevenueCurve&, const RevenueCurve&) = default;

 private:
  RevenueCurve() = default;

  Kind kind_ = Kind::linear;
  Money rate_ = 0.0;
  Units cap_ = 0;
  std::vector<std::pair<Units, Money>> points_;
};

inline Money revenue_at(const RevenueCurve& curve, Units q) { return curve(q); }

struct CurveValidation {
  bool ok = true;
  /// First k with R(k+1) - R(k) > R(k) - R(k-1), or 0 when R(0) != 0.
  std::optional<Units> violation;
  std::string message;

  explicit operator bool() const { return ok; }
};

/// Checks R(0) = 0, concave marginals and average-revenue monotonicity over 0..max_q.
CurveValidation validate_curve(const RevenueCurve& curve, Units max_q);

/// A complete auction input. Immutable; the constructor certifies every
/// model assumption and throws InvalidInput otherwise.
class Instance {
 public:
  Instance(std::vector<Bid> bids, RevenueCurve curve);

  std::span<const Bid> bids() const { return bids_; }
  const RevenueCurve& curve() const { return curve_; }
  std::size_t size() const { return bids_.size(); }
  Units supply() const { return supply_; }
  bool unit_capacity() const;

  /// Copy with bid `pos` replaced (id is preserved).
  Instance with_bid(std::size_t pos, Money valuation, Units capacity) const;

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  std::vector<Bid> bids_;
  RevenueCurve curve_;
  Units supply_ = 0;
};

/// Allocation and per-unit payment for every seller, indexed by position in
/// the instance's bid list.
struct AuctionOutcome {
  std::vector<Units> allocation;
  std::vector<Money> payment_per_unit;
  Money profit = 0.0;

  static AuctionOutcome empty(std::size_t n);

  Units units() const;
  friend bool operator==(const AuctionOutcome&, const AuctionOutcome&) = default;
};

/// R(sum x) - sum p_i x_i
Money recompute_profit(const AuctionOutcome& outcome, const RevenueCurve& curve);

/// (p_i - v_i) x_i for a seller whose true per-unit valuation is `true_valuation`.
Money utility(const AuctionOutcome& outcome, std::size_t pos, Money true_valuation);

/// Feasibility, IR against reported bids and profit identity; returns a
/// description of the first failure or nothing.
std::optional<std::string> check_outcome(const AuctionOutcome& outcome, std::span<const Bid> reported,
                                         const RevenueCurve& curve);

}  // namespace procure
