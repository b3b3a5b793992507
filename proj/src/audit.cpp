#include <algorithm>
#include <cmath>

#include "procure/simulation.hpp"

namespace procure {

std::vector<Dimension> parse_dimensions(std::string_view list) {
  std::vector<Dimension> dims;
  while (!list.empty()) {
    const auto comma = list.find(',');
    const auto item = list.substr(0, comma);
    if (item == "valuation") {
      dims.push_back(Dimension::valuation);
    } else if (item == "capacity") {
      dims.push_back(Dimension::capacity);
    } else {
      throw InvalidInput("unknown audit dimension '" + std::string(item) + "' (expected valuation or capacity)");
    }
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (dims.empty()) throw InvalidInput("no audit dimensions given");
  return dims;
}

std::vector<Money> valuation_deviations(const Instance& inst, std::size_t pos, const AuctionOutcome& truthful,
                                        Money offered_price) {
  const Money v = inst.bids()[pos].valuation;
  auto delta = [](Money x) { return 1e-6 * std::max(1.0, std::abs(x)); };
  std::vector<Money> out{0.0, 0.5 * v, 0.9 * v, 1.1 * v, 2.0 * v};
  auto around = [&](Money x) {
    out.push_back(x - delta(x));
    out.push_back(x + delta(x));
  };
  for (std::size_t j = 0; j < inst.size(); ++j) {
    if (j != pos) around(inst.bids()[j].valuation);
  }
  around(offered_price);
  if (truthful.allocation[pos] > 0) around(truthful.payment_per_unit[pos]);

  std::erase_if(out, [&](Money x) { return !(x >= 0.0) || !std::isfinite(x) || x == v; });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Units> capacity_deviations(Units capacity) {
  std::vector<Units> out{1, capacity / 2, static_cast<Units>(std::floor(0.9 * static_cast<double>(capacity))),
                         capacity - 1};
  std::erase_if(out, [&](Units q) { return q < 1 || q >= capacity; });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

// Outcome under a deviation, or nothing when the mechanism has no outcome
// for that report (Kth-price with every seller winning).
std::optional<AuctionOutcome> try_run(const Mechanism& mech, const Instance& inst, const PartitionDraw& draw) {
  try {
    return run_mechanism(mech, inst, draw);
  } catch (const UndefinedPrice&) {
    return std::nullopt;
  }
}

}  // namespace

AuditReport audit_truthfulness(const Instance& inst, const Mechanism& mech, std::span<const Dimension> dims,
                               std::uint64_t seed) {
  AuditReport report;
  report.mechanism = mech.name;
  report.seed = seed;
  const auto draw = PartitionDraw::from_seed(inst.size(), seed);
  const auto truthful = run_mechanism(mech, inst, draw);

  const bool want_valuation = std::find(dims.begin(), dims.end(), Dimension::valuation) != dims.end();
  const bool want_capacity = std::find(dims.begin(), dims.end(), Dimension::capacity) != dims.end();

  for (std::size_t pos = 0; pos < inst.size(); ++pos) {
    const Bid bid = inst.bids()[pos];
    const Money honest = utility(truthful, pos, bid.valuation);

    auto test = [&](Money v_hat, Units q_hat) {
      const auto deviated = inst.with_bid(pos, v_hat, q_hat);
      const auto outcome = try_run(mech, deviated, draw);
      if (!outcome) return;
      ++report.deviations_tested;
      const Money gain = utility(*outcome, pos, bid.valuation) - honest;
      if (gain > kViolationThreshold) {
        report.violations.push_back(Violation{pos, bid, deviated.bids()[pos], gain});
      }
    };

    if (want_valuation) {
      // Price the seller is offered when it undercuts everyone.
      Money offered = 0.0;
      if (auto low = try_run(mech, inst.with_bid(pos, 0.0, bid.capacity), draw); low && low->allocation[pos] > 0) {
        offered = low->payment_per_unit[pos];
      }
      for (Money v_hat : valuation_deviations(inst, pos, truthful, offered)) test(v_hat, bid.capacity);
    }
    if (want_capacity) {
      for (Units q_hat : capacity_deviations(bid.capacity)) test(bid.valuation, q_hat);
    }
  }
  return report;
}

AuditReport audit_allocation_monotonicity(const Instance& inst, const Mechanism& mech, std::size_t grid,
                                          std::uint64_t seed) {
  if (grid < 2) throw InvalidInput("monotonicity sweep needs at least 2 grid points");
  AuditReport report;
  report.mechanism = mech.name;
  report.seed = seed;
  const auto draw = PartitionDraw::from_seed(inst.size(), seed);

  Money top = 0.0;
  for (const auto& b : inst.bids()) top = std::max(top, b.valuation);
  top = top > 0.0 ? 2.0 * top : 1.0;

  for (std::size_t pos = 0; pos < inst.size(); ++pos) {
    const Units q = inst.bids()[pos].capacity;
    std::optional<std::pair<Bid, Units>> prev;
    for (std::size_t t = 0; t < grid; ++t) {
      const Money v = top * static_cast<Money>(t) / static_cast<Money>(grid - 1);
      const auto swept = inst.with_bid(pos, v, q);
      const auto outcome = try_run(mech, swept, draw);
      if (!outcome) continue;
      ++report.deviations_tested;
      const Units x = outcome->allocation[pos];
      if (prev && x > prev->second) {
        report.violations.push_back(
            Violation{pos, prev->first, swept.bids()[pos], static_cast<Money>(x - prev->second)});
      }
      prev = {swept.bids()[pos], x};
    }
  }
  return report;
}

}  // namespace procure
