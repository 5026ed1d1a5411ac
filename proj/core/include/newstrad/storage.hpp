#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "newstrad/common.hpp"

namespace newstrad {

/// Identifier of a file miner: a pseudonym in hex inside the simulator, any
/// label in a standalone registry file.
using MinerId = std::string;

/// A storage miner as seen by the Miner Collector.
struct FileMinerProfile {
  MinerId miner_id;
  Coin fee = 0;  ///< coin per byte
  std::uint64_t free_space = 0;  ///< bytes

  bool operator==(const FileMinerProfile&) const = default;
};

struct AllocationRequest {
  std::uint64_t file_size = 0;  ///< bytes
  Coin budget = 0;
  std::size_t threshold = 1;    ///< max candidates collected
};

struct Allotment {
  MinerId miner_id;
  std::uint64_t allotted = 0;
  Coin fee = 0;

  bool operator==(const Allotment&) const = default;
};

struct AllocationPlan {
  std::vector<Allotment> entries;
  Coin total_cost = 0;
};

// The pipeline below follows the Miner Collector's steps in order:
// unit budget, candidate scan, cheapest-first finalization, chunk allotment,
// cost accounting. All arithmetic is exact.

/// b = budget / file_size. Throws Error(ZeroFileSize).
Coin unit_budget(const Coin& budget, std::uint64_t file_size);

/// Scans `miners` in registry order, keeping those with fee <= b and free
/// space, until `threshold` are collected. Throws Error(NoCandidates) if none
/// qualify and Error(InvalidArgument) if threshold is zero.
std::vector<FileMinerProfile> select_candidates(std::span<const FileMinerProfile> miners,
                                                const Coin& b, std::size_t threshold);

/// Sorts candidates by (fee, miner_id) and keeps the shortest prefix whose
/// combined free space covers file_size. Throws Error(InsufficientCapacity).
std::vector<FileMinerProfile> finalize(std::span<const FileMinerProfile> candidates,
                                       std::uint64_t file_size);

/// Fills the finalized miners in order; every miner but the last gives all of
/// its free space, the last takes the remainder.
std::vector<Allotment> allot(std::span<const FileMinerProfile> finalized, std::uint64_t file_size);

/// T_p = sum(allotted_i * fee_i).
Coin plan_cost(std::span<const Allotment> entries);

/// Full pipeline. The returned plan covers file_size exactly, respects every
/// miner's free space and costs at most the budget.
AllocationPlan allocate(std::span<const FileMinerProfile> miners, const AllocationRequest& request);

/// Miner registry: one JSON object per line {miner_id, fee, free_space}.
/// Fees may be integers, decimals, or "a/b" strings.
std::vector<FileMinerProfile> read_miner_registry(std::istream& in);

std::string plan_to_json(const AllocationPlan& plan);

}  // namespace newstrad
