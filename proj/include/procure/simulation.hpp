#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "procure/core.hpp"
#include "procure/mechanisms.hpp"

namespace procure {

enum class BenchmarkKind { f, t, f2 };

/// "f", "t" or "f2"; throws InvalidInput otherwise.
BenchmarkKind parse_benchmark(std::string_view name);
std::string_view benchmark_name(BenchmarkKind kind);

/// Profit of the named benchmark. F^(2) on a single bid throws BenchmarkInvalid.
Money benchmark_profit(const Instance& inst, BenchmarkKind kind);

/// Seed of trial `index` under `master`: splitmix64(master + (index + 1) * 0x9e3779b97f4a7c15).
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index);

struct RatioReport {
  std::string mechanism;
  std::string benchmark_name;
  std::uint64_t seed = 0;
  bool exact = false;  // exhaustive enumeration instead of sampling
  std::size_t trials = 0;
  Money mean_profit = 0.0;
  Money std_error = 0.0;
  Money benchmark = 0.0;
  double ratio_estimate = 0.0;
  double ratio_lower_bound_3sigma = 0.0;
  std::string instance_digest;
};

/// Monte Carlo estimate of expected profit over `trials` independent draws
/// (trial t uses trial_seed(seed, t)). Throws BenchmarkInvalid when the
/// benchmark is not positive. Trials may run on several threads; the
/// result does not depend on that.
RatioReport estimate_ratio(const Instance& inst, const Mechanism& mech, BenchmarkKind benchmark, std::size_t trials,
                           std::uint64_t seed);

/// Same report computed from exhaustive_expected_profit (std_error 0).
RatioReport exact_ratio(const Instance& inst, const Mechanism& mech, BenchmarkKind benchmark);

inline constexpr std::size_t kMaxExhaustiveBids = 20;

/// Exact expected profit, averaging over all 2^n equiprobable partitions.
/// Deterministic mechanisms are run once. Refuses n > 20.
Money exhaustive_expected_profit(const Instance& inst, const Mechanism& mech);

/// FNV-1a over the canonical instance JSON plus the configuration string.
std::string instance_digest(const Instance& inst, std::string_view config);

// ---------------------------------------------------------------------------
// Audits

enum class Dimension { valuation, capacity };

/// "valuation" / "capacity", comma separated. Throws InvalidInput.
std::vector<Dimension> parse_dimensions(std::string_view list);

struct Violation {
  std::size_t bidder = 0;  // position in the instance
  Bid truthful;
  Bid deviation;
  /// Utility gain for truthfulness audits, allocation increase for
  /// monotonicity audits.
  Money gain = 0.0;
};

struct AuditReport {
  std::string mechanism;
  std::uint64_t seed = 0;
  std::size_t deviations_tested = 0;
  std::vector<Violation> violations;
};

/// Violations must beat the truthful utility by more than this.
inline constexpr Money kViolationThreshold = 1e-6;

/// Unilateral deviation search with the coin flips frozen to
/// PartitionDraw::from_seed(n, seed). Valuation deviations per seller:
/// 0, 0.5v, 0.9v, 1.1v, 2v, every other valuation +- delta and the
/// seller's offered price +- delta. Capacity deviations are underbids only:
/// 1, q/2, 0.9q, q-1.
AuditReport audit_truthfulness(const Instance& inst, const Mechanism& mech, std::span<const Dimension> dims,
                               std::uint64_t seed);

/// Sweeps each seller's valuation over `grid` evenly spaced points in
/// [0, 2 * max valuation] (coin flips frozen) and records every step where
/// the allocation increases.
AuditReport audit_allocation_monotonicity(const Instance& inst, const Mechanism& mech, std::size_t grid,
                                          std::uint64_t seed);

/// Deviation valuations the truthfulness audit tries for `pos`, given the
/// outcome of truthful reporting.
std::vector<Money> valuation_deviations(const Instance& inst, std::size_t pos, const AuctionOutcome& truthful,
                                        Money offered_price);

std::vector<Units> capacity_deviations(Units capacity);

}  // namespace procure
