#include "procure/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace procure {

namespace {

// Concavity is checked on floating marginals; interpolation between
// breakpoints introduces relative rounding error, so the slack scales.
bool nearly_at_most(Money a, Money b) {
  return a <= b + kTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

std::vector<Bid> make_bids(std::span<const Money> valuations, std::span<const Units> capacities) {
  if (!capacities.empty() && capacities.size() != valuations.size()) {
    throw InvalidInput("make_bids: " + std::to_string(valuations.size()) + " valuations but " +
                       std::to_string(capacities.size()) + " capacities");
  }
  std::vector<Bid> bids;
  bids.reserve(valuations.size());
  for (std::size_t i = 0; i < valuations.size(); ++i) {
    bids.push_back(Bid{valuations[i], capacities.empty() ? Units{1} : capacities[i], i});
  }
  return bids;
}

std::vector<std::size_t> sorted_order(std::span<const Bid> bids) {
  std::vector<std::size_t> order(bids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (bids[a].valuation != bids[b].valuation) return bids[a].valuation < bids[b].valuation;
    return bids[a].id < bids[b].id;
  });
  return order;
}

Units total_supply(std::span<const Bid> bids) {
  Units m = 0;
  for (const auto& b : bids) m += b.capacity;
  return m;
}

bool unit_capacity(std::span<const Bid> bids) {
  return std::all_of(bids.begin(), bids.end(), [](const Bid& b) { return b.capacity == 1; });
}

// ---------------------------------------------------------------------------
// RevenueCurve

RevenueCurve RevenueCurve::linear(Money rate) {
  if (!std::isfinite(rate) || rate < 0.0) {
    throw InvalidInput("linear curve: rate must be a non-negative number");
  }
  RevenueCurve c;
  c.kind_ = Kind::linear;
  c.rate_ = rate;
  return c;
}

RevenueCurve RevenueCurve::capped_linear(Money rate, Units cap) {
  if (!std::isfinite(rate) || rate < 0.0) {
    throw InvalidInput("capped curve: rate must be a non-negative number");
  }
  if (cap < 0) throw InvalidInput("capped curve: D must be non-negative");
  RevenueCurve c;
  c.kind_ = Kind::capped_linear;
  c.rate_ = rate;
  c.cap_ = cap;
  return c;
}

RevenueCurve RevenueCurve::piecewise_linear(std::vector<std::pair<Units, Money>> points) {
  if (points.empty() || points.front().first != 0) {
    points.insert(points.begin(), {0, 0.0});
  }
  if (points.front().second != 0.0) {
    throw InvalidInput("pwl curve: R(0) must be 0");
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto [q0, r0] = points[i - 1];
    const auto [q1, r1] = points[i];
    if (!std::isfinite(r1)) throw InvalidInput("pwl curve: non-finite revenue at q=" + std::to_string(q1));
    if (q1 <= q0) {
      throw InvalidInput("pwl curve: breakpoint quantities must be strictly increasing (at q=" +
                         std::to_string(q1) + ")");
    }
    if (r1 < r0) {
      throw InvalidInput("pwl curve: negative marginal revenue between q=" + std::to_string(q0) +
                         " and q=" + std::to_string(q1));
    }
  }
  RevenueCurve c;
  c.kind_ = Kind::piecewise_linear;
  c.points_ = std::move(points);
  return c;
}

Money RevenueCurve::operator()(Units q) const {
  if (q <= 0) return 0.0;
  switch (kind_) {
    case Kind::linear:
      return rate_ * static_cast<Money>(q);
    case Kind::capped_linear:
      return rate_ * static_cast<Money>(std::min(q, cap_));
    case Kind::piecewise_linear: {
      if (q >= points_.back().first) return points_.back().second;
      auto hi = std::upper_bound(points_.begin(), points_.end(), q,
                                 [](Units v, const auto& p) { return v < p.first; });
      auto lo = std::prev(hi);
      if (lo->first == q) return lo->second;
      const auto span = static_cast<Money>(hi->first - lo->first);
      return lo->second + (hi->second - lo->second) * static_cast<Money>(q - lo->first) / span;
    }
  }
  return 0.0;
}

CurveValidation validate_curve(const RevenueCurve& curve, Units max_q) {
  if (curve(0) != 0.0) return {false, Units{0}, "R(0) != 0"};
  Money prev_marginal = curve(1) - curve(0);
  for (Units k = 1; k < max_q; ++k) {
    const Money rk = curve(k);
    const Money rk1 = curve(k + 1);
    const Money marginal = rk1 - rk;
    if (!nearly_at_most(marginal, prev_marginal)) {
      return {false, k,
              "marginal revenue increases at k=" + std::to_string(k) + ": R(k+1)-R(k)=" + std::to_string(marginal) +
                  " > R(k)-R(k-1)=" + std::to_string(prev_marginal)};
    }
    // R(k)/k >= R(k+1)/(k+1), in multiplied-out form.
    if (!nearly_at_most(static_cast<Money>(k) * rk1, static_cast<Money>(k + 1) * rk)) {
      return {false, k, "average revenue increases at k=" + std::to_string(k)};
    }
    prev_marginal = marginal;
  }
  return {};
}

// ---------------------------------------------------------------------------
// Instance

Instance::Instance(std::vector<Bid> bids, RevenueCurve curve) : bids_(std::move(bids)), curve_(std::move(curve)) {
  if (bids_.empty()) throw InvalidInput("instance needs at least one bid");
  std::unordered_set<std::size_t> ids;
  for (std::size_t i = 0; i < bids_.size(); ++i) {
    const Bid& b = bids_[i];
    if (!std::isfinite(b.valuation) || b.valuation < 0.0) {
      throw InvalidInput("bid " + std::to_string(i) + ": valuation must be a non-negative number");
    }
    if (b.capacity < 1) throw InvalidInput("bid " + std::to_string(i) + ": capacity must be >= 1");
    if (!ids.insert(b.id).second) throw InvalidInput("bid " + std::to_string(i) + ": duplicate seller id");
    supply_ += b.capacity;
  }
  if (auto check = validate_curve(curve_, supply_); !check) {
    throw InvalidInput("revenue curve is not concave: " + check.message);
  }
}

bool Instance::unit_capacity() const { return procure::unit_capacity(bids_); }

Instance Instance::with_bid(std::size_t pos, Money valuation, Units capacity) const {
  auto bids = bids_;
  bids.at(pos).valuation = valuation;
  bids.at(pos).capacity = capacity;
  return Instance(std::move(bids), curve_);
}

// ---------------------------------------------------------------------------
// AuctionOutcome

AuctionOutcome AuctionOutcome::empty(std::size_t n) {
  return AuctionOutcome{std::vector<Units>(n, 0), std::vector<Money>(n, 0.0), 0.0};
}

Units AuctionOutcome::units() const { return std::accumulate(allocation.begin(), allocation.end(), Units{0}); }

Money recompute_profit(const AuctionOutcome& outcome, const RevenueCurve& curve) {
  Money cost = 0.0;
  for (std::size_t i = 0; i < outcome.allocation.size(); ++i) {
    cost += outcome.payment_per_unit[i] * static_cast<Money>(outcome.allocation[i]);
  }
  return curve(outcome.units()) - cost;
}

Money utility(const AuctionOutcome& outcome, std::size_t pos, Money true_valuation) {
  return (outcome.payment_per_unit[pos] - true_valuation) * static_cast<Money>(outcome.allocation[pos]);
}

std::optional<std::string> check_outcome(const AuctionOutcome& outcome, std::span<const Bid> reported,
                                         const RevenueCurve& curve) {
  if (outcome.allocation.size() != reported.size() || outcome.payment_per_unit.size() != reported.size()) {
    return "outcome size does not match bid count";
  }
  for (std::size_t i = 0; i < reported.size(); ++i) {
    const Units x = outcome.allocation[i];
    const Money p = outcome.payment_per_unit[i];
    const auto who = "seller " + std::to_string(i);
    if (x < 0 || x > reported[i].capacity) return who + ": allocation outside [0, capacity]";
    if (x > 0 && !at_most(reported[i].valuation, p)) return who + ": paid below reported valuation";
    if (x == 0 && p != 0.0) return who + ": loser receives a payment";
  }
  const Money expected = recompute_profit(outcome, curve);
  if (std::abs(expected - outcome.profit) > kTolerance * std::max(1.0, std::abs(expected))) {
    return "profit field " + std::to_string(outcome.profit) + " != recomputed " + std::to_string(expected);
  }
  return std::nullopt;
}

}  // namespace procure
