#pragma once

// Random instance generators for property tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "procure/core.hpp"

namespace testing_support {

using namespace procure;

struct InstanceShape {
  std::size_t min_n = 1;
  std::size_t max_n = 8;
  Units max_q = 1;
  Units max_supply = 0;  // 0 = unbounded
  bool dyadic = false;   // valuations and marginals on a 1/64 grid (exact sums)
  enum class Curve { linear, capped, concave, any } curve = Curve::any;
};

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool coin() { return (rng_() >> 63) != 0; }
  std::uint64_t bits() { return rng_(); }

  Money money(double lo, double hi, bool dyadic) {
    const double x = uniform(lo, hi);
    return dyadic ? std::round(x * 64.0) / 64.0 : x;
  }

  RevenueCurve curve(InstanceShape::Curve kind, Units m, bool dyadic) {
    if (kind == InstanceShape::Curve::any) kind = static_cast<InstanceShape::Curve>(integer(0, 2));
    switch (kind) {
      case InstanceShape::Curve::linear:
        return RevenueCurve::linear(money(1.0, 20.0, dyadic));
      case InstanceShape::Curve::capped:
        return RevenueCurve::capped_linear(money(1.0, 20.0, dyadic), integer(1, std::max<Units>(1, m)));
      default: {
        std::vector<Money> marginals(static_cast<std::size_t>(m));
        for (auto& x : marginals) x = money(0.0, 25.0, dyadic);
        std::sort(marginals.begin(), marginals.end(), std::greater<>());
        std::vector<std::pair<Units, Money>> pts{{0, 0.0}};
        Money total = 0.0;
        for (std::size_t k = 0; k < marginals.size(); ++k) pts.emplace_back(static_cast<Units>(k + 1), total += marginals[k]);
        return RevenueCurve::piecewise_linear(std::move(pts));
      }
    }
  }

  Instance instance(const InstanceShape& s) {
    while (true) {
      const auto n = static_cast<std::size_t>(integer(static_cast<std::int64_t>(s.min_n), static_cast<std::int64_t>(s.max_n)));
      std::vector<Bid> bids;
      Units m = 0;
      for (std::size_t i = 0; i < n; ++i) {
        bids.push_back(Bid{money(0.0, 15.0, s.dyadic), integer(1, s.max_q), i});
        m += bids.back().capacity;
      }
      if (s.max_supply > 0 && m > s.max_supply) continue;
      return Instance(std::move(bids), curve(s.curve, m, s.dyadic));
    }
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testing_support
