#include "procure/io.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace procure {

using nlohmann::json;

namespace {

// Character iterator that counts consumed newlines, so SAX callbacks can ask
// which line the parser is on.
class LineCountingIterator {
 public:
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  LineCountingIterator() = default;
  LineCountingIterator(const char* p, std::size_t* newlines) : p_(p), newlines_(newlines) {}

  reference operator*() const { return *p_; }
  LineCountingIterator& operator++() {
    if (*p_ == '\n') ++*newlines_;
    ++p_;
    return *this;
  }
  LineCountingIterator operator++(int) {
    auto old = *this;
    ++*this;
    return old;
  }
  friend bool operator==(const LineCountingIterator& a, const LineCountingIterator& b) { return a.p_ == b.p_; }

 private:
  const char* p_ = nullptr;
  std::size_t* newlines_ = nullptr;
};

// Builds the DOM through nlohmann's own SAX DOM builder while recording the
// source line of every value, keyed by JSON pointer.
class LocatingSax {
 public:
  LocatingSax(json& root, const std::size_t* newlines) : dom_(root, true), newlines_(newlines) {}

  std::map<std::string, std::size_t> lines;

  bool null() { return scalar(dom_.null()); }
  bool boolean(bool v) { return scalar(dom_.boolean(v)); }
  bool number_integer(json::number_integer_t v) { return scalar(dom_.number_integer(v)); }
  bool number_unsigned(json::number_unsigned_t v) { return scalar(dom_.number_unsigned(v)); }
  bool number_float(json::number_float_t v, const json::string_t& s) { return scalar(dom_.number_float(v, s)); }
  bool string(json::string_t& v) { return scalar(dom_.string(v)); }
  bool binary(json::binary_t& v) { return scalar(dom_.binary(v)); }

  bool start_object(std::size_t n) {
    open(true);
    return dom_.start_object(n);
  }
  bool end_object() {
    close();
    return dom_.end_object();
  }
  bool start_array(std::size_t n) {
    open(false);
    return dom_.start_array(n);
  }
  bool end_array() {
    close();
    return dom_.end_array();
  }
  bool key(json::string_t& k) {
    stack_.back().key = k;
    lines[stack_.back().path + "/" + k] = line();
    return dom_.key(k);
  }
  bool parse_error(std::size_t pos, const std::string& token, const nlohmann::detail::exception& ex) {
    return dom_.parse_error(pos, token, ex);
  }

 private:
  struct Frame {
    bool object = false;
    std::string path;
    std::string key;
    std::size_t index = 0;
  };

  std::size_t line() const { return *newlines_ + 1; }

  std::string child_path() {
    if (stack_.empty()) {
      lines[""] = line();
      return "";
    }
    const Frame& f = stack_.back();
    const auto path = f.path + "/" + (f.object ? f.key : std::to_string(f.index));
    if (!f.object) lines[path] = line();
    return path;
  }
  void advance() {
    if (!stack_.empty() && !stack_.back().object) ++stack_.back().index;
  }
  bool scalar(bool ok) {
    child_path();
    advance();
    return ok;
  }
  void open(bool object) {
    auto path = child_path();
    stack_.push_back(Frame{object, std::move(path), {}, 0});
  }
  void close() {
    stack_.pop_back();
    advance();
  }

  nlohmann::detail::json_sax_dom_parser<json> dom_;
  const std::size_t* newlines_;
  std::vector<Frame> stack_;
};

class InstanceReader {
 public:
  explicit InstanceReader(const std::map<std::string, std::size_t>& lines) : lines_(lines) {}

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    std::string where = path.empty() ? "/" : path;
    // Fall back to the nearest recorded ancestor.
    for (std::string p = path;; p = p.substr(0, p.rfind('/'))) {
      if (auto it = lines_.find(p); it != lines_.end()) {
        throw InvalidInput("line " + std::to_string(it->second) + ": " + where + ": " + what);
      }
      if (p.empty()) break;
    }
    throw InvalidInput(where + ": " + what);
  }

  void only_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) const {
    for (const auto& [k, _] : obj.items()) {
      if (!allowed.contains(k)) fail(path + "/" + k, "unknown field");
    }
  }

  const json& field(const json& obj, const std::string& path, const std::string& key) const {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, "missing field '" + key + "'");
    return *it;
  }

  Money money(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || x < 0.0) fail(path, "expected a non-negative number");
    return x;
  }

  Units units(const json& v, const std::string& path, Units min) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    if (v.is_number_unsigned()) {
      const auto u = v.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(std::numeric_limits<Units>::max())) fail(path, "integer out of range");
    }
    const auto x = v.get<Units>();
    if (x < min) fail(path, "expected an integer >= " + std::to_string(min));
    return x;
  }

  RevenueCurve curve(const json& c) const {
    const std::string path = "/curve";
    if (!c.is_object()) fail(path, "expected an object");
    const auto& kind_v = field(c, path, "kind");
    if (!kind_v.is_string()) fail(path + "/kind", "expected a string");
    const auto kind = kind_v.get<std::string>();
    try {
      if (kind == "linear") {
        only_keys(c, path, {"kind", "r"});
        return RevenueCurve::linear(money(field(c, path, "r"), path + "/r"));
      }
      if (kind == "capped") {
        only_keys(c, path, {"kind", "r", "D"});
        return RevenueCurve::capped_linear(money(field(c, path, "r"), path + "/r"),
                                           units(field(c, path, "D"), path + "/D", 0));
      }
      if (kind == "pwl") {
        only_keys(c, path, {"kind", "points"});
        const auto& pts = field(c, path, "points");
        if (!pts.is_array() || pts.empty()) fail(path + "/points", "expected a non-empty array");
        std::vector<std::pair<Units, Money>> points;
        for (std::size_t i = 0; i < pts.size(); ++i) {
          const auto p = path + "/points/" + std::to_string(i);
          if (!pts[i].is_array() || pts[i].size() != 2) fail(p, "expected a [q, R] pair");
          points.emplace_back(units(pts[i][0], p + "/0", 0), money(pts[i][1], p + "/1"));
        }
        return RevenueCurve::piecewise_linear(std::move(points));
      }
    } catch (const InvalidInput& e) {
      if (std::string_view(e.what()).starts_with("line ")) throw;
      fail(path, e.what());
    }
    fail(path + "/kind", "unknown curve kind '" + kind + "' (expected linear, capped or pwl)");
  }

  Instance instance(const json& root) const {
    if (!root.is_object()) fail("", "expected an object");
    only_keys(root, "", {"bids", "curve"});
    const auto& bids_v = field(root, "", "bids");
    if (!bids_v.is_array() || bids_v.empty()) fail("/bids", "expected a non-empty array");
    std::vector<Bid> bids;
    for (std::size_t i = 0; i < bids_v.size(); ++i) {
      const auto p = "/bids/" + std::to_string(i);
      const auto& b = bids_v[i];
      if (!b.is_object()) fail(p, "expected an object");
      only_keys(b, p, {"v", "q"});
      bids.push_back(Bid{money(field(b, p, "v"), p + "/v"), units(field(b, p, "q"), p + "/q", 1), i});
    }
    auto c = curve(field(root, "", "curve"));
    try {
      return Instance(std::move(bids), std::move(c));
    } catch (const InvalidInput& e) {
      fail("/curve", e.what());
    }
  }

 private:
  const std::map<std::string, std::size_t>& lines_;
};

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string number(double x) { return json(x).dump(); }

}  // namespace

Instance parse_instance(std::string_view text) {
  json root;
  std::size_t newlines = 0;
  LocatingSax sax(root, &newlines);
  try {
    json::sax_parse(LineCountingIterator(text.data(), &newlines),
                    LineCountingIterator(text.data() + text.size(), &newlines), &sax);
  } catch (const json::exception& e) {
    // The DOM builder rethrows parse errors sliced to the base type.
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
  return InstanceReader(sax.lines).instance(root);
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open instance file '" + path.string() + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse_instance(text);
  } catch (const InvalidInput& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

json to_json(const RevenueCurve& curve) {
  switch (curve.kind()) {
    case RevenueCurve::Kind::linear:
      return {{"kind", "linear"}, {"r", curve.rate()}};
    case RevenueCurve::Kind::capped_linear:
      return {{"kind", "capped"}, {"r", curve.rate()}, {"D", curve.cap()}};
    case RevenueCurve::Kind::piecewise_linear: {
      json pts = json::array();
      for (const auto& [q, r] : curve.points()) pts.push_back(json::array({q, r}));
      return {{"kind", "pwl"}, {"points", pts}};
    }
  }
  return {};
}

json to_json(const Instance& inst) {
  json bids = json::array();
  for (const auto& b : inst.bids()) bids.push_back({{"v", b.valuation}, {"q", b.capacity}});
  return {{"bids", bids}, {"curve", to_json(inst.curve())}};
}

json to_json(const AuctionOutcome& outcome) {
  return {{"allocation", outcome.allocation}, {"payment_per_unit", outcome.payment_per_unit}, {"profit", outcome.profit}};
}

AuctionOutcome outcome_from_json(const json& j) {
  try {
    AuctionOutcome out;
    out.allocation = j.at("allocation").get<std::vector<Units>>();
    out.payment_per_unit = j.at("payment_per_unit").get<std::vector<Money>>();
    out.profit = j.at("profit").get<Money>();
    if (out.allocation.size() != out.payment_per_unit.size()) {
      throw InvalidInput("outcome: allocation and payment_per_unit differ in length");
    }
    return out;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("outcome: ") + e.what());
  }
}

json to_json(const BenchmarkResult& r) {
  return {{"profit", r.profit},
          {"winners", r.winners},
          {"units", r.units},
          {"price", r.price ? json(*r.price) : json(nullptr)}};
}

json to_json(const MechanismRun& run) {
  json sides = json::array();
  for (bool b : run.partition.first_side) sides.push_back(b);
  return {{"partition", {{"seed", run.partition.seed}, {"first_side", sides}}},
          {"f_prime", run.f_prime},
          {"f_double_prime", run.f_double_prime},
          {"chosen_side", run.chosen == Side::first ? "first" : "second"},
          {"outcome", to_json(run.outcome)}};
}

json to_json(const RatioReport& r) {
  return {{"mechanism", r.mechanism},
          {"benchmark", r.benchmark_name},
          {"seed", r.seed},
          {"exact", r.exact},
          {"trials", r.trials},
          {"mean_profit", r.mean_profit},
          {"std_error", r.std_error},
          {"benchmark_profit", r.benchmark},
          {"ratio_estimate", r.ratio_estimate},
          {"ratio_lower_bound_3sigma", r.ratio_lower_bound_3sigma},
          {"instance_digest", r.instance_digest}};
}

json to_json(const AuditReport& r) {
  json violations = json::array();
  for (const auto& v : r.violations) {
    violations.push_back({{"bidder", v.bidder},
                          {"truthful", {{"v", v.truthful.valuation}, {"q", v.truthful.capacity}}},
                          {"deviation", {{"v", v.deviation.valuation}, {"q", v.deviation.capacity}}},
                          {"gain", v.gain}});
  }
  return {{"mechanism", r.mechanism},
          {"seed", r.seed},
          {"deviations_tested", r.deviations_tested},
          {"violations", violations}};
}

std::string csv_header() { return "family,params,mechanism,benchmark,trials,mean,stderr,ratio"; }

std::string csv_row(const RatioReport& r, std::string_view family, std::string_view params) {
  std::ostringstream out;
  out << csv_field(family) << ',' << csv_field(params) << ',' << csv_field(r.mechanism) << ','
      << csv_field(r.benchmark_name) << ',' << r.trials << ',' << number(r.mean_profit) << ','
      << number(r.std_error) << ',' << number(r.ratio_estimate);
  return out.str();
}

}  // namespace procure
