#include "cli.hpp"

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "newstrad/ledger_json.hpp"
#include "newstrad/scenario.hpp"
#include "newstrad/storage.hpp"

namespace newstrad::cli {

namespace fs = std::filesystem;

namespace {

std::optional<std::string> validate(const SimConfig& c) {
  if (c.t_R < 1) return "--t-r must be at least 1";
  if (c.t_D < 1) return "--t-d must be at least 1";
  if (c.audit.deadline_window < 1) return "--deadline-window must be at least 1";
  if (c.audit.penalty_multiplier < 1) return "--penalty-multiplier must be at least 1";
  return std::nullopt;
}

bool write_file(const fs::path& path, const std::string& content, std::ostream& err) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    err << "error: cannot write " << path.string() << "\n";
    return false;
  }
  f << content;
  return static_cast<bool>(f);
}

}  // namespace

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Scenario scenario;
  try {
    scenario = load_scenario(config.scenario_path);
  } catch (const Error& e) {
    err << "error: " << config.scenario_path.string() << ": " << e.what() << "\n";
    return kExitInputError;
  }

  SimConfig sim_config;
  scenario.config.apply_to(sim_config);
  ConfigOverrides flags;
  flags.seed = config.seed;
  flags.t_R = config.t_R;
  flags.t_D = config.t_D;
  flags.deadline_window = config.deadline_window;
  flags.penalty_multiplier = config.penalty_multiplier;
  flags.apply_to(sim_config);
  if (auto problem = validate(sim_config)) {
    err << "error: " << *problem << "\n";
    return kExitInputError;
  }

  std::optional<SimulationReport> report;
  try {
    auto sim = make_simulation(scenario, sim_config);
    report = sim.run();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) {
    err << "error: cannot create " << config.output_dir.string() << ": " << ec.message() << "\n";
    return kExitInputError;
  }
  if (!write_file(config.output_dir / "report.json", report_to_json(*report), err) ||
      !write_file(config.output_dir / "ledger.jsonl", dump_ledger(report->chain), err)) {
    return kExitInputError;
  }

  out << scenario.name << ": " << report->chain.size() << " blocks, " << report->chain.transaction_count()
      << " transactions, " << report->errors.size() << " event errors, " << report->verdicts.size()
      << " verdicts\n";
  if (!report->invariants_hold()) {
    for (const auto& f : report->invariant_failures) err << "invariant failed: " << f << "\n";
    return kExitIntegrityFailure;
  }
  return kExitOk;
}

int cmd_verify(const fs::path& ledger_path, std::ostream& out, std::ostream& err) {
  std::ifstream in(ledger_path, std::ios::binary);
  if (!in) {
    err << "error: cannot open " << ledger_path.string() << "\n";
    return kExitInputError;
  }
  try {
    Chain chain = read_ledger(in);
    auto report = verify_chain(chain);
    if (report.valid) {
      out << "valid: " << chain.size() << " blocks\n";
      return kExitOk;
    }
    out << "invalid: first bad block index " << *report.first_bad_index << "\n";
    return kExitIntegrityFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

int cmd_allocate(const AllocateArgs& args, std::ostream& out, std::ostream& err) {
  std::vector<FileMinerProfile> miners;
  Coin budget;
  try {
    std::ifstream in(args.registry_path, std::ios::binary);
    if (!in) throw Error(Errc::BadFormat, "cannot open " + args.registry_path.string());
    miners = read_miner_registry(in);
    budget = parse_coin(args.budget);
    if (budget < 0) throw Error(Errc::BadFormat, "budget must be non-negative");
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  try {
    AllocationPlan plan = allocate(miners, {args.size, budget, args.threshold});
    auto j = nlohmann::json::parse(plan_to_json(plan));
    j["unit_budget"] = format_coin(unit_budget(budget, args.size));
    j["budget"] = format_coin(budget);
    out << j.dump() << "\n";
    return kExitOk;
  } catch (const Error& e) {
    switch (e.code()) {
      case Errc::ZeroFileSize:
      case Errc::NoCandidates:
      case Errc::InsufficientCapacity:
        out << nlohmann::json{{"error", std::string(errc_name(e.code()))}}.dump() << "\n";
        err << e.what() << "\n";
        return kExitAllocationInfeasible;
      default:
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
  }
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"newstrad: news-trading ledger marketplace simulator"};
  app.require_subcommand(1);

  RunConfig run;
  std::string penalty;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write report.json and ledger.jsonl");
  run_cmd->add_option("--scenario", run.scenario_path, "Scenario JSON file")->required();
  run_cmd->add_option("--seed", run.seed, "Simulation seed");
  run_cmd->add_option("--t-r", run.t_R, "Re-query window in ticks");
  run_cmd->add_option("--t-d", run.t_D, "Chunk lifetime after retrieval in ticks");
  run_cmd->add_option("--deadline-window", run.deadline_window, "Audit notice deadline in ticks");
  run_cmd->add_option("--penalty-multiplier", penalty, "Penalty as a multiple of the price (e.g. 2 or 5/2)");
  run_cmd->add_option("--out", run.output_dir, "Output directory")->capture_default_str();

  std::string ledger_path;
  auto* verify_cmd = app.add_subcommand("verify", "Verify a ledger.jsonl dump");
  verify_cmd->add_option("ledger", ledger_path, "Ledger dump")->required();

  AllocateArgs alloc;
  auto* alloc_cmd = app.add_subcommand("allocate", "Plan chunk storage for a file within a budget");
  alloc_cmd->add_option("--registry", alloc.registry_path, "Miner registry (JSON lines)")->required();
  alloc_cmd->add_option("--size", alloc.size, "File size in bytes")->required();
  alloc_cmd->add_option("--budget", alloc.budget, "Budget in coin (integer, decimal or a/b)")->required();
  alloc_cmd->add_option("--threshold", alloc.threshold, "Maximum number of candidate miners")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (*run_cmd) {
    if (!penalty.empty()) {
      try {
        run.penalty_multiplier = parse_coin(penalty);
      } catch (const Error& e) {
        err << "error: --penalty-multiplier: " << e.what() << "\n";
        return kExitInputError;
      }
    }
    return cmd_run(run, out, err);
  }
  if (*verify_cmd) return cmd_verify(ledger_path, out, err);
  return cmd_allocate(alloc, out, err);
}

}  // namespace newstrad::cli
