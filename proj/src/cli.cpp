#include "procure/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "procure/benchmarks.hpp"
#include "procure/generators.hpp"
#include "procure/io.hpp"
#include "procure/mechanisms.hpp"
#include "procure/simulation.hpp"

namespace procure::cli {

using nlohmann::json;

namespace {

struct Loaded {
  Instance instance;
  std::string family;  // generator family, or "file"
  std::string params;  // generator params, or the path
};

Loaded load(const CliConfig& cfg) {
  if (cfg.instance_path.has_value() == cfg.generator_spec.has_value()) {
    throw InvalidInput("give exactly one of --instance PATH or --generate SPEC");
  }
  if (cfg.instance_path) return {load_instance(*cfg.instance_path), "file", *cfg.instance_path};
  const auto spec = GeneratorSpec::parse(*cfg.generator_spec);
  return {generate(spec), spec.family, spec.params_string()};
}

std::uint64_t resolve_seed(const CliConfig& cfg) {
  if (cfg.seed) return *cfg.seed;
  if (const char* env = std::getenv("PROCURE_SEED"); env && *env) {
    std::uint64_t s = 0;
    const std::string_view text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), s);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw InvalidInput("PROCURE_SEED must be an unsigned integer");
    }
    return s;
  }
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

Mechanism mechanism(const CliConfig& cfg) {
  if (cfg.mechanism.empty()) throw InvalidInput("--mechanism is required");
  return parse_mechanism(cfg.mechanism, cfg.demand_cap);
}

void json_only(const CliConfig& cfg) {
  if (cfg.format != "json") throw InvalidInput("'" + cfg.command + "' only supports --format json");
}

json utilities(const AuctionOutcome& outcome, const Instance& inst) {
  json u = json::array();
  for (std::size_t i = 0; i < inst.size(); ++i) u.push_back(utility(outcome, i, inst.bids()[i].valuation));
  return u;
}

int cmd_run(const CliConfig& cfg, std::ostream& out) {
  json_only(cfg);
  const auto loaded = load(cfg);
  const auto mech = mechanism(cfg);
  const auto& inst = loaded.instance;
  json report{{"mechanism", mech.name}};
  if (mech.randomized()) {
    const auto seed = resolve_seed(cfg);
    const auto run = mech.kind == Mechanism::Kind::pepa ? run_pepa(inst, seed) : run_pepac(inst, seed);
    report["seed"] = seed;
    report["run"] = to_json(run);
    report["utilities"] = utilities(run.outcome, inst);
  } else {
    const auto outcome = run_mechanism(mech, inst, PartitionDraw{});
    report["outcome"] = to_json(outcome);
    report["utilities"] = utilities(outcome, inst);
  }
  out << report.dump(2) << '\n';
  return kOk;
}

int cmd_benchmark(const CliConfig& cfg, std::ostream& out) {
  json_only(cfg);
  const auto inst = load(cfg).instance;
  const auto f = optimal_single_price(inst);
  json report{{"f", to_json(f)}, {"t", to_json(optimal_multi_price(inst))}};
  try {
    report["f2"] = to_json(optimal_single_price_min2(inst));
  } catch (const BenchmarkInvalid& e) {
    report["f2"] = {{"undefined", e.what()}};
  }
  report["opp"] = f.price ? json(*f.price) : json(nullptr);
  out << report.dump(2) << '\n';
  return kOk;
}

int cmd_ratio(const CliConfig& cfg, std::ostream& out) {
  if (cfg.format != "json" && cfg.format != "csv") throw InvalidInput("--format must be json or csv");
  const auto loaded = load(cfg);
  const auto mech = mechanism(cfg);
  const auto bench = parse_benchmark(cfg.benchmark);
  if (cfg.trials < 1) throw InvalidInput("--trials must be at least 1");

  RatioReport report;
  if (cfg.exact && loaded.instance.size() <= 16) {
    report = exact_ratio(loaded.instance, mech, bench);
  } else {
    report = estimate_ratio(loaded.instance, mech, bench, cfg.trials, resolve_seed(cfg));
  }
  if (cfg.format == "csv") {
    out << "# seed=" << report.seed << (report.exact ? " exact" : "") << '\n'
        << csv_header() << '\n'
        << csv_row(report, loaded.family, loaded.params) << '\n';
  } else {
    out << to_json(report).dump(2) << '\n';
  }
  return kOk;
}

int cmd_audit(const CliConfig& cfg, std::ostream& out) {
  json_only(cfg);
  const auto inst = load(cfg).instance;
  const auto mech = mechanism(cfg);
  const auto seed = resolve_seed(cfg);
  AuditReport report;
  if (cfg.monotone_grid) {
    report = audit_allocation_monotonicity(inst, mech, *cfg.monotone_grid, seed);
  } else {
    const auto dims = parse_dimensions(cfg.dims);
    if (std::find(dims.begin(), dims.end(), Dimension::capacity) != dims.end() && inst.unit_capacity()) {
      throw InvalidInput("capacity audit needs a capacitated instance");
    }
    report = audit_truthfulness(inst, mech, dims, seed);
  }
  out << to_json(report).dump(2) << '\n';
  return report.violations.empty() ? kOk : kViolationsFound;
}

int cmd_generate(const CliConfig& cfg, std::ostream& out) {
  json_only(cfg);
  if (!cfg.generator_spec) throw InvalidInput("generate needs --generate SPEC");
  out << to_json(load(cfg).instance).dump(2) << '\n';
  return kOk;
}

int cmd_validate(const CliConfig& cfg, std::ostream& out) {
  json_only(cfg);
  const auto inst = load(cfg).instance;
  out << json{{"valid", true}, {"bids", inst.size()}, {"supply", inst.supply()}}.dump(2) << '\n';
  return kOk;
}

void add_source(CLI::App* sub, CliConfig& cfg) {
  sub->add_option("--instance", cfg.instance_path, "Instance JSON file");
  sub->add_option("--generate", cfg.generator_spec, "Generator spec, family:key=val,...");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig cfg;
  CLI::App app{"Prior-free procurement auctions: mechanisms, benchmarks, ratio estimates and audits", "procure"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto* run_cmd = app.add_subcommand("run", "Run a mechanism once and print the outcome");
  auto* bench_cmd = app.add_subcommand("benchmark", "Print the F, T, F^(2) and OPP benchmarks");
  auto* ratio_cmd = app.add_subcommand("ratio", "Estimate expected profit over a benchmark");
  auto* audit_cmd = app.add_subcommand("audit", "Search for profitable unilateral deviations");
  auto* gen_cmd = app.add_subcommand("generate", "Print a generated instance");
  auto* val_cmd = app.add_subcommand("validate", "Check an instance against the model assumptions");

  for (auto* sub : {run_cmd, bench_cmd, ratio_cmd, audit_cmd, gen_cmd, val_cmd}) {
    add_source(sub, cfg);
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", cfg.out_path, "Write the report to PATH");
  }
  for (auto* sub : {run_cmd, ratio_cmd, audit_cmd}) {
    sub->add_option("--mechanism", cfg.mechanism, "pepa, pepac, kth-price, bid-independent:<f>");
    sub->add_option("--seed", cfg.seed, "RNG seed (default: $PROCURE_SEED, else random and reported)");
    sub->add_option("--demand-cap", cfg.demand_cap, "Kth-price demand cap in units");
  }
  ratio_cmd->add_option("--benchmark", cfg.benchmark, "f, t or f2")->check(CLI::IsMember({"f", "t", "f2"}));
  ratio_cmd->add_option("--trials", cfg.trials, "Monte Carlo trials");
  ratio_cmd->add_flag("--exact", cfg.exact, "Enumerate all partitions when n <= 16");
  audit_cmd->add_option("--dims", cfg.dims, "valuation, capacity or valuation,capacity");
  audit_cmd->add_option("--monotone-grid", cfg.monotone_grid, "Sweep valuations over N points instead");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  std::ostringstream buffer;
  int code = kOk;
  try {
    if (cfg.command == "run") code = cmd_run(cfg, buffer);
    else if (cfg.command == "benchmark") code = cmd_benchmark(cfg, buffer);
    else if (cfg.command == "ratio") code = cmd_ratio(cfg, buffer);
    else if (cfg.command == "audit") code = cmd_audit(cfg, buffer);
    else if (cfg.command == "generate") code = cmd_generate(cfg, buffer);
    else code = cmd_validate(cfg, buffer);
  } catch (const UnknownMechanism& e) {
    err << "error: " << e.what() << '\n';
    return kUnknownMechanism;
  } catch (const BenchmarkInvalid& e) {
    err << "error: " << e.what() << '\n';
    return kBenchmarkInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  if (cfg.out_path) {
    std::ofstream file(*cfg.out_path, std::ios::binary);
    if (!file || !(file << buffer.str())) {
      err << "error: cannot write '" << *cfg.out_path << "'\n";
      return kInputError;
    }
  } else {
    out << buffer.str();
  }
  return code;
}

}  // namespace procure::cli
