#include "procure/generators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <random>
#include <set>

namespace procure {

GeneratorSpec GeneratorSpec::parse(std::string_view text) {
  GeneratorSpec spec;
  const auto colon = text.find(':');
  spec.family = std::string(text.substr(0, colon));
  if (spec.family.empty()) throw InvalidInput("generator spec '" + std::string(text) + "' has no family");
  if (colon == std::string_view::npos) return spec;
  auto rest = text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw InvalidInput("generator parameter '" + std::string(item) + "' is not key=value");
    }
    const auto [it, inserted] = spec.params.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
    if (!inserted) throw InvalidInput("generator parameter '" + it->first + "' given twice");
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return spec;
}

std::string GeneratorSpec::params_string() const {
  std::string out;
  for (const auto& [k, v] : params) {
    if (!out.empty()) out += ',';
    out += k + "=" + v;
  }
  return out;
}

namespace {

class Params {
 public:
  Params(std::string_view family, const GeneratorParams& p, std::set<std::string, std::less<>> known)
      : family_(family), p_(p) {
    for (const auto& [k, _] : p_) {
      if (!known.contains(k)) throw InvalidInput(family_ + ": unknown parameter '" + k + "'");
    }
  }

  double real(std::string_view key, double fallback) const {
    auto it = p_.find(key);
    if (it == p_.end()) return fallback;
    double x = 0.0;
    const auto& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(x)) bad(key, "a number");
    return x;
  }

  std::int64_t integer(std::string_view key, std::int64_t fallback) const {
    auto it = p_.find(key);
    if (it == p_.end()) return fallback;
    std::int64_t x = 0;
    const auto& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || ptr != s.data() + s.size()) bad(key, "an integer");
    return x;
  }

  std::string text(std::string_view key, std::string fallback) const {
    auto it = p_.find(key);
    return it == p_.end() ? fallback : it->second;
  }

  void require(bool ok, const std::string& what) const {
    if (!ok) throw InvalidInput(family_ + ": " + what);
  }

 private:
  [[noreturn]] void bad(std::string_view key, const char* what) const {
    throw InvalidInput(family_ + ": parameter '" + std::string(key) + "' must be " + what);
  }

  std::string family_;
  const GeneratorParams& p_;
};

// Uniform double in [0, 1) from the top 53 bits; platform independent,
// unlike std::uniform_real_distribution.
double unit_draw(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

Instance uniform_random(const Params& p) {
  const auto seed = static_cast<std::uint64_t>(p.integer("seed", 0));
  const auto n = p.integer("n", 8);
  const double vmax = p.real("vmax", 10.0);
  const auto qmin = p.integer("qmin", 1);
  const auto qmax = p.integer("qmax", qmin);
  const auto kind = p.text("curve", "linear");
  p.require(n >= 1, "n must be >= 1");
  p.require(vmax > 0.0, "vmax must be positive");
  p.require(qmin >= 1 && qmax >= qmin, "need 1 <= qmin <= qmax");

  std::mt19937_64 gen(seed);
  std::vector<Bid> bids;
  Units m = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    const Money v = vmax * unit_draw(gen);
    const Units q = qmin + static_cast<Units>(unit_draw(gen) * static_cast<double>(qmax - qmin + 1));
    bids.push_back(Bid{v, std::min(q, qmax), static_cast<std::size_t>(i)});
    m += bids.back().capacity;
  }

  const double r = p.real("r", vmax);
  if (kind == "linear") return Instance(std::move(bids), RevenueCurve::linear(r));
  if (kind == "capped") {
    const auto cap = p.integer("D", std::max<Units>(1, m / 2));
    p.require(cap >= 0, "D must be non-negative");
    return Instance(std::move(bids), RevenueCurve::capped_linear(r, cap));
  }
  if (kind == "concave") {
    std::vector<Money> marginals(static_cast<std::size_t>(m));
    for (auto& x : marginals) x = 2.0 * vmax * unit_draw(gen);
    std::sort(marginals.begin(), marginals.end(), std::greater<>());
    std::vector<std::pair<Units, Money>> points{{0, 0.0}};
    Money total = 0.0;
    for (std::size_t k = 0; k < marginals.size(); ++k) {
      total += marginals[k];
      points.emplace_back(static_cast<Units>(k + 1), total);
    }
    return Instance(std::move(bids), RevenueCurve::piecewise_linear(std::move(points)));
  }
  throw InvalidInput("uniform-random: curve must be linear, capped or concave (got '" + kind + "')");
}

}  // namespace

Instance generate(std::string_view family, const GeneratorParams& params) {
  if (family == "example1") {
    Params p(family, params, {"r", "eps", "n"});
    const double r = p.real("r", 10.0);
    const double eps = p.real("eps", 1.0);
    const auto n = p.integer("n", 4);
    p.require(r > 0.0 && eps > 0.0 && eps < r, "need 0 < eps < r");
    p.require(n >= 2, "n must be >= 2");
    std::vector<Money> v{eps, r - eps};
    v.resize(static_cast<std::size_t>(n), r);
    return Instance(make_bids(v), RevenueCurve::linear(r));
  }
  if (family == "tightness") {
    Params p(family, params, {"l", "eps", "n"});
    const double l = p.real("l", 10.0);
    const double eps = p.real("eps", 1.0);
    const auto n = p.integer("n", 4);
    p.require(l > 0.0 && eps > 0.0 && eps < l, "need 0 < eps < l");
    p.require(n >= 2, "n must be >= 2");
    std::vector<Money> v{l - eps, l};
    v.resize(static_cast<std::size_t>(n), 100.0 * l);
    return Instance(make_bids(v), RevenueCurve::linear(2.0 * l));
  }
  if (family == "lowball") {
    Params p(family, params, {"r", "L"});
    const double r = p.real("r", 10.0);
    const double low = p.real("L", 0.9 * r);
    p.require(r > 0.0 && low >= 0.0 && low < r, "need 0 <= L < r");
    const std::vector<Money> v{low, r};
    return Instance(make_bids(v), RevenueCurve::linear(r));
  }
  if (family == "kth-price-demo") {
    Params p(family, params, {});
    const std::vector<Money> v{6, 8, 10, 12};
    const std::vector<Units> q{100, 100, 200, 100};
    return Instance(make_bids(v, q), RevenueCurve::capped_linear(15, 200));
  }
  if (family == "uniform-random") {
    return uniform_random(Params(family, params, {"seed", "n", "vmax", "qmin", "qmax", "curve", "r", "D"}));
  }
  throw InvalidInput("unknown generator family '" + std::string(family) +
                     "' (known: example1, tightness, lowball, kth-price-demo, uniform-random)");
}

}  // namespace procure
