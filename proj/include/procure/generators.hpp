#pragma once

#include <map>
#include <string>
#include <string_view>

#include "procure/core.hpp"

namespace procure {

using GeneratorParams = std::map<std::string, std::string, std::less<>>;

struct GeneratorSpec {
  std::string family;
  GeneratorParams params;

  /// Parses "family" or "family:key=val,key=val". Throws InvalidInput.
  static GeneratorSpec parse(std::string_view text);
  /// "key=val,..." in key order.
  std::string params_string() const;
};

/// Instance families:
///   example1        r=10 eps=1 n=4      bids (eps, r-eps, r, ..., r), linear(r)
///   tightness       l=10 eps=1 n=4      bids (l-eps, l, 100l, ...), linear(2l)
///   lowball         r=10 L=9            bids (L, r), linear(r)
///   kth-price-demo  (none)              (6,100) (8,100) (10,200) (12,100), capped(15, 200)
///   uniform-random  seed n vmax qmin qmax curve r D
/// Throws InvalidInput for unknown families, unknown keys or bad values.
Instance generate(std::string_view family, const GeneratorParams& params = {});

inline Instance generate(const GeneratorSpec& spec) { return generate(spec.family, spec.params); }

}  // namespace procure
