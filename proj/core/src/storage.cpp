#include "newstrad/storage.hpp"

#include <algorithm>
#include <istream>

#include "json.hpp"
#include "json_util.hpp"

namespace newstrad {

Coin unit_budget(const Coin& budget, std::uint64_t file_size) {
  if (file_size == 0) {
    throw Error(Errc::ZeroFileSize, "file size must be positive");
  }
  return budget / Coin(file_size);
}

std::vector<FileMinerProfile> select_candidates(std::span<const FileMinerProfile> miners,
                                                const Coin& b, std::size_t threshold) {
  if (threshold == 0) {
    throw Error(Errc::InvalidArgument, "threshold must be at least 1");
  }
  std::vector<FileMinerProfile> selected;
  for (const auto& miner : miners) {
    if (miner.fee <= b && miner.free_space > 0) {
      selected.push_back(miner);
      if (selected.size() == threshold) break;
    }
  }
  if (selected.empty()) {
    throw Error(Errc::NoCandidates, "no file miner charges at most " + format_coin(b) + " per byte");
  }
  return selected;
}

std::vector<FileMinerProfile> finalize(std::span<const FileMinerProfile> candidates,
                                       std::uint64_t file_size) {
  if (candidates.empty()) {
    throw Error(Errc::NoCandidates, "candidate list is empty");
  }
  std::vector<FileMinerProfile> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.fee != b.fee) return a.fee < b.fee;
    return a.miner_id < b.miner_id;
  });

  // rs is signed: it goes negative once the last miner over-covers the file.
  boost::multiprecision::cpp_int remaining = file_size;
  std::vector<FileMinerProfile> finalized;
  for (auto& miner : sorted) {
    remaining -= miner.free_space;
    finalized.push_back(std::move(miner));
    if (remaining <= 0) break;
  }
  if (remaining > 0) {
    throw Error(Errc::InsufficientCapacity,
                "candidates leave " + remaining.str() + " bytes unplaced");
  }
  return finalized;
}

std::vector<Allotment> allot(std::span<const FileMinerProfile> finalized, std::uint64_t file_size) {
  std::uint64_t remaining = file_size;
  std::vector<Allotment> entries;
  for (const auto& miner : finalized) {
    if (remaining == 0) break;
    if (remaining < miner.free_space) {
      // Last chunk: smaller than the miner's space, no deduction needed.
      entries.push_back({miner.miner_id, remaining, miner.fee});
      remaining = 0;
      break;
    }
    remaining -= miner.free_space;
    entries.push_back({miner.miner_id, miner.free_space, miner.fee});
  }
  return entries;
}

Coin plan_cost(std::span<const Allotment> entries) {
  Coin total = 0;
  for (const auto& e : entries) {
    total += Coin(e.allotted) * e.fee;
  }
  return total;
}

AllocationPlan allocate(std::span<const FileMinerProfile> miners, const AllocationRequest& request) {
  Coin b = unit_budget(request.budget, request.file_size);
  auto candidates = select_candidates(miners, b, request.threshold);
  auto finalized = finalize(candidates, request.file_size);
  AllocationPlan plan;
  plan.entries = allot(finalized, request.file_size);
  plan.total_cost = plan_cost(plan.entries);
  return plan;
}

std::vector<FileMinerProfile> read_miner_registry(std::istream& in) {
  std::vector<FileMinerProfile> miners;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      FileMinerProfile m;
      m.miner_id = detail::string(j, "miner_id");
      m.fee = detail::coin_value(detail::require(j, "fee"), "fee");
      m.free_space = detail::u64(j, "free_space");
      if (m.fee < 0) throw Error(Errc::BadFormat, "fee must be non-negative");
      miners.push_back(std::move(m));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::BadFormat, "registry line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(Errc::BadFormat, "registry line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return miners;
}

std::string plan_to_json(const AllocationPlan& plan) {
  nlohmann::json j = nlohmann::json::object();
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : plan.entries) {
    entries.push_back({{"miner_id", e.miner_id}, {"allotted", e.allotted}, {"fee", format_coin(e.fee)}});
  }
  j["entries"] = std::move(entries);
  j["total_cost"] = format_coin(plan.total_cost);
  return j.dump();
}

}  // namespace newstrad
