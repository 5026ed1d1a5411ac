#pragma once

// Reference implementations used only by tests. They are written from the
// problem statement, not from the library code, and favor obviousness over
// speed.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "newstrad/common.hpp"

namespace oracle {

using newstrad::Coin;

struct Miner {
  std::string id;
  Coin fee;
  std::uint64_t space = 0;
};

// First `threshold` miners, in list order, whose fee fits under the unit
// budget and who have any space at all.
inline std::vector<Miner> candidate_filter(const std::vector<Miner>& miners, const Coin& b,
                                           std::size_t threshold) {
  std::vector<Miner> out;
  for (const auto& m : miners) {
    if (out.size() == threshold) break;
    if (m.fee <= b && m.space > 0) out.push_back(m);
  }
  return out;
}

// Cost of storing `size` bytes on exactly the miners in `subset`, filling the
// cheapest first. nullopt when the subset cannot hold the file.
inline std::optional<Coin> fill_cheapest_first(std::vector<Miner> subset, std::uint64_t size) {
  std::sort(subset.begin(), subset.end(), [](const Miner& a, const Miner& b) { return a.fee < b.fee; });
  Coin cost = 0;
  std::uint64_t left = size;
  for (const auto& m : subset) {
    std::uint64_t take = std::min(left, m.space);
    cost += Coin(take) * m.fee;
    left -= take;
  }
  if (left != 0) return std::nullopt;
  return cost;
}

// Minimum storage cost over every subset of `candidates`. Exponential; keep
// the candidate count small.
inline std::optional<Coin> brute_force_min_cost(const std::vector<Miner>& candidates, std::uint64_t size) {
  std::optional<Coin> best;
  const std::size_t n = candidates.size();
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<Miner> subset;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) subset.push_back(candidates[i]);
    }
    auto cost = fill_cheapest_first(subset, size);
    if (cost && (!best || *cost < *best)) best = cost;
  }
  return best;
}

// Index of the winner of a latency race: lowest latency, then smallest id.
template <typename Id>
std::size_t race_winner(const std::vector<std::pair<Id, std::uint64_t>>& pool) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < pool.size(); ++i) {
    const auto& [id, lat] = pool[i];
    if (lat < pool[best].second || (lat == pool[best].second && id < pool[best].first)) best = i;
  }
  return best;
}

// Re-query decision table.
enum class Decision { Requery, Stay };

inline Decision requery_table(bool satisfied, std::uint64_t t_c, std::uint64_t t_R) {
  if (satisfied) return Decision::Stay;
  if (t_c <= t_R) return Decision::Requery;
  return Decision::Stay;
}

}  // namespace oracle
