#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "procure/benchmarks.hpp"
#include "procure/core.hpp"
#include "procure/mechanisms.hpp"
#include "procure/simulation.hpp"

namespace procure {

// Instance files:
//   {"bids":[{"v":<number>,"q":<int>},...],
//    "curve":{"kind":"linear"|"capped"|"pwl","r":<number>,"D":<int>,"points":[[q,R],...]}}
// Bid ids are the array positions.

/// Parses and certifies an instance. Errors are InvalidInput carrying the
/// line number and JSON path of the offending field.
Instance parse_instance(std::string_view text);
Instance load_instance(const std::filesystem::path& path);

nlohmann::json to_json(const Instance& inst);
nlohmann::json to_json(const RevenueCurve& curve);
nlohmann::json to_json(const AuctionOutcome& outcome);
nlohmann::json to_json(const BenchmarkResult& result);
nlohmann::json to_json(const MechanismRun& run);
nlohmann::json to_json(const RatioReport& report);
nlohmann::json to_json(const AuditReport& report);

/// Inverse of to_json(AuctionOutcome); throws InvalidInput.
AuctionOutcome outcome_from_json(const nlohmann::json& j);

/// Header and one row: family,params,mechanism,benchmark,trials,mean,stderr,ratio
std::string csv_header();
std::string csv_row(const RatioReport& report, std::string_view family, std::string_view params);

}  // namespace procure
