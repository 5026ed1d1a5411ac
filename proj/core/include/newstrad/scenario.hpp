#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "newstrad/simnet.hpp"

namespace newstrad {

/// Config values a scenario file may pin; command-line flags override them.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<Tick> t_R;
  std::optional<Tick> t_D;
  std::optional<Tick> deadline_window;
  std::optional<Coin> penalty_multiplier;
  std::optional<Coin> listing_reward;

  /// Fields set here replace those in `config`.
  void apply_to(SimConfig& config) const;
};

struct ScheduledAction {
  Tick at = 0;
  Action action;
};

struct Scenario {
  std::string name;
  ConfigOverrides config;
  std::vector<ActorSpec> actors;
  std::vector<ScheduledAction> events;
};

/// Parses a scenario document:
///
///   { "name": ..., "seed": ..., "config": {t_r, t_d, deadline_window,
///     penalty_multiplier, listing_reward},
///     "actors":  [{name, role, balance, identity: {t, nonce, text, salt}}],
///     "miners":  [{name, kind: "news"|"file", latency | fee + free_space, ...}],
///     "events":  [{at, op, args}] }
///
/// Throws Error(BadScenario); JSON syntax errors name the line and column.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Builds a simulation with every scenario event scheduled in file order.
Simulation make_simulation(const Scenario& scenario, const SimConfig& config);

}  // namespace newstrad
