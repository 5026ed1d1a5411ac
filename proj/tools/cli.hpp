#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "newstrad/common.hpp"

namespace newstrad::cli {

// Exit-code contract shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitIntegrityFailure = 2;
inline constexpr int kExitAllocationInfeasible = 3;

/// Unset fields fall back to the scenario file, then to built-in defaults.
struct RunConfig {
  std::filesystem::path scenario_path;
  std::optional<std::uint64_t> seed;
  std::optional<Tick> t_R;
  std::optional<Tick> t_D;
  std::optional<Tick> deadline_window;
  std::optional<Coin> penalty_multiplier;
  std::filesystem::path output_dir = "out";
};

/// Runs a scenario and writes report.json and ledger.jsonl into output_dir.
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Verifies a ledger.jsonl dump.
int cmd_verify(const std::filesystem::path& ledger_path, std::ostream& out, std::ostream& err);

struct AllocateArgs {
  std::filesystem::path registry_path;
  std::uint64_t size = 0;
  std::string budget = "0";
  std::size_t threshold = 1;
};

/// Runs the allocation pipeline against a miner registry and prints the plan.
int cmd_allocate(const AllocateArgs& args, std::ostream& out, std::ostream& err);

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace newstrad::cli
