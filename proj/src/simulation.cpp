#include "procure/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "procure/benchmarks.hpp"
#include "procure/io.hpp"

namespace procure {

BenchmarkKind parse_benchmark(std::string_view name) {
  if (name == "f") return BenchmarkKind::f;
  if (name == "t") return BenchmarkKind::t;
  if (name == "f2") return BenchmarkKind::f2;
  throw InvalidInput("unknown benchmark '" + std::string(name) + "' (expected f, t or f2)");
}

std::string_view benchmark_name(BenchmarkKind kind) {
  switch (kind) {
    case BenchmarkKind::f: return "f";
    case BenchmarkKind::t: return "t";
    case BenchmarkKind::f2: return "f2";
  }
  return "?";
}

Money benchmark_profit(const Instance& inst, BenchmarkKind kind) {
  switch (kind) {
    case BenchmarkKind::f: return optimal_single_price(inst).profit;
    case BenchmarkKind::t: return optimal_multi_price(inst).profit;
    case BenchmarkKind::f2: return optimal_single_price_min2(inst).profit;
  }
  return 0.0;
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string instance_digest(const Instance& inst, std::string_view config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  feed(to_json(inst).dump());
  feed("|");
  feed(config);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

Money positive_benchmark(const Instance& inst, BenchmarkKind kind) {
  const Money b = benchmark_profit(inst, kind);
  if (!(b > 0.0)) {
    throw BenchmarkInvalid("benchmark " + std::string(benchmark_name(kind)) + " is " + std::to_string(b) +
                           " on this instance; a competitive ratio needs a positive benchmark");
  }
  return b;
}

std::string config_string(const Mechanism& mech, BenchmarkKind kind, std::size_t trials, std::uint64_t seed,
                          bool exact) {
  return mech.name + "|" + std::string(benchmark_name(kind)) + "|" + std::to_string(trials) + "|" +
         std::to_string(seed) + "|" + (exact ? "exact" : "mc");
}

}  // namespace

RatioReport estimate_ratio(const Instance& inst, const Mechanism& mech, BenchmarkKind benchmark, std::size_t trials,
                           std::uint64_t seed) {
  if (trials < 1) throw InvalidInput("trials must be at least 1");
  RatioReport r;
  r.mechanism = mech.name;
  r.benchmark_name = std::string(benchmark_name(benchmark));
  r.seed = seed;
  r.trials = trials;
  r.benchmark = positive_benchmark(inst, benchmark);
  r.instance_digest = instance_digest(inst, config_string(mech, benchmark, trials, seed, false));

  if (!mech.randomized()) {
    r.mean_profit = run_mechanism(mech, inst, PartitionDraw::from_seed(inst.size(), seed)).profit;
  } else {
    std::vector<Money> profit(trials);
    const std::size_t workers =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(1, trials / 1024));
    auto work = [&](std::size_t w) {
      for (std::size_t t = w; t < trials; t += workers) {
        profit[t] = run_mechanism(mech, inst, PartitionDraw::from_seed(inst.size(), trial_seed(seed, t))).profit;
      }
    };
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work, w);
      work(0);
    }
    // Folded in trial order.
    Money sum = 0.0;
    for (Money p : profit) sum += p;
    r.mean_profit = sum / static_cast<Money>(trials);
    if (trials > 1) {
      Money ss = 0.0;
      for (Money p : profit) ss += (p - r.mean_profit) * (p - r.mean_profit);
      const Money sd = std::sqrt(ss / static_cast<Money>(trials - 1));
      r.std_error = sd / std::sqrt(static_cast<Money>(trials));
    }
  }
  r.ratio_estimate = r.mean_profit / r.benchmark;
  r.ratio_lower_bound_3sigma = (r.mean_profit - 3.0 * r.std_error) / r.benchmark;
  return r;
}

Money exhaustive_expected_profit(const Instance& inst, const Mechanism& mech) {
  const std::size_t n = inst.size();
  if (!mech.randomized()) return run_mechanism(mech, inst, PartitionDraw::from_mask(n, 0)).profit;
  if (n > kMaxExhaustiveBids) {
    throw InvalidInput("exhaustive enumeration is limited to " + std::to_string(kMaxExhaustiveBids) + " bids (got " +
                       std::to_string(n) + ")");
  }
  const std::uint64_t count = std::uint64_t{1} << n;
  Money sum = 0.0;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    sum += run_mechanism(mech, inst, PartitionDraw::from_mask(n, mask)).profit;
  }
  return sum / static_cast<Money>(count);
}

RatioReport exact_ratio(const Instance& inst, const Mechanism& mech, BenchmarkKind benchmark) {
  RatioReport r;
  r.mechanism = mech.name;
  r.benchmark_name = std::string(benchmark_name(benchmark));
  r.exact = true;
  r.benchmark = positive_benchmark(inst, benchmark);
  r.trials = mech.randomized() ? (std::size_t{1} << std::min(inst.size(), kMaxExhaustiveBids)) : 1;
  r.mean_profit = exhaustive_expected_profit(inst, mech);
  r.ratio_estimate = r.mean_profit / r.benchmark;
  r.ratio_lower_bound_3sigma = r.ratio_estimate;
  r.instance_digest = instance_digest(inst, config_string(mech, benchmark, r.trials, 0, true));
  return r;
}

}  // namespace procure
