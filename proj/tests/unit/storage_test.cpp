#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "newstrad/storage.hpp"
#include "oracles.hpp"

using namespace newstrad;

namespace {

FileMinerProfile fm(std::string id, Coin fee, std::uint64_t space) { return {std::move(id), fee, space}; }

std::vector<FileMinerProfile> worked_registry() {
  return {fm("M1", 3, 50), fm("M2", 1, 40), fm("M3", 2, 100), fm("M4", Coin(5) / 2, 0)};
}

std::vector<std::string> ids(const std::vector<FileMinerProfile>& v) {
  std::vector<std::string> out;
  for (const auto& m : v) out.push_back(m.miner_id);
  return out;
}

std::vector<oracle::Miner> to_oracle(std::span<const FileMinerProfile> v) {
  std::vector<oracle::Miner> out;
  for (const auto& m : v) out.push_back({m.miner_id, m.fee, m.free_space});
  return out;
}

Errc error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::InvalidArgument;
}

}  // namespace

TEST(UnitBudget, Examples) {
  EXPECT_EQ(unit_budget(1000, 500), 2);
  EXPECT_EQ(unit_budget(0, 100), 0);
  EXPECT_EQ(unit_budget(1, 3), Coin(1) / 3);
  EXPECT_EQ(error_of([] { unit_budget(100, 0); }), Errc::ZeroFileSize);
}

TEST(SelectCandidates, WorkedExample) {
  auto reg = worked_registry();
  auto got = select_candidates(reg, Coin(5) / 2, 3);
  EXPECT_EQ(ids(got), (std::vector<std::string>{"M2", "M3"}));
  auto oracle_ids = oracle::candidate_filter(to_oracle(reg), Coin(5) / 2, 3);
  ASSERT_EQ(oracle_ids.size(), 2u);
  EXPECT_EQ(oracle_ids[0].id, "M2");
  EXPECT_EQ(oracle_ids[1].id, "M3");
}

TEST(SelectCandidates, EarlyStopAtThreshold) {
  auto reg = worked_registry();
  EXPECT_EQ(ids(select_candidates(reg, Coin(5) / 2, 1)), (std::vector<std::string>{"M2"}));
}

TEST(SelectCandidates, AllTooExpensive) {
  auto reg = worked_registry();
  EXPECT_EQ(error_of([&] { select_candidates(reg, Coin(1) / 2, 3); }), Errc::NoCandidates);
}

TEST(SelectCandidates, ZeroThresholdRejected) {
  auto reg = worked_registry();
  EXPECT_EQ(error_of([&] { select_candidates(reg, 5, 0); }), Errc::InvalidArgument);
}

TEST(SelectCandidates, FeeEqualToUnitBudgetQualifies) {
  std::vector<FileMinerProfile> reg{fm("A", Coin(5) / 2, 10)};
  EXPECT_EQ(select_candidates(reg, Coin(5) / 2, 1).size(), 1u);
}

TEST(SelectCandidates, OrderSensitiveWhenMoreQualifyThanThreshold) {
  std::vector<FileMinerProfile> reg{fm("A", 2, 10), fm("B", 1, 10), fm("C", 1, 10)};
  std::vector<FileMinerProfile> rev(reg.rbegin(), reg.rend());
  EXPECT_EQ(ids(select_candidates(reg, 2, 2)), (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(ids(select_candidates(rev, 2, 2)), (std::vector<std::string>{"C", "B"}));
}

TEST(SelectCandidates, MatchesOracleOnRandomInputs) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    auto inst = fixtures::random_allocation(rng, 20);
    Coin b = unit_budget(inst.request.budget, inst.request.file_size);
    auto expected = oracle::candidate_filter(to_oracle(inst.miners), b, inst.request.threshold);
    if (expected.empty()) {
      EXPECT_EQ(error_of([&] { select_candidates(inst.miners, b, inst.request.threshold); }), Errc::NoCandidates);
      continue;
    }
    auto got = select_candidates(inst.miners, b, inst.request.threshold);
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t k = 0; k < got.size(); ++k) EXPECT_EQ(got[k].miner_id, expected[k].id);
  }
}

TEST(Finalize, WorkedExample) {
  std::vector<FileMinerProfile> sfm{fm("M2", 1, 40), fm("M3", 2, 100)};
  EXPECT_EQ(ids(finalize(sfm, 100)), (std::vector<std::string>{"M2", "M3"}));
}

TEST(Finalize, SortsByFeeBeforeCutting) {
  std::vector<FileMinerProfile> sfm{fm("X", 5, 1000), fm("Y", 1, 60), fm("Z", 2, 60)};
  EXPECT_EQ(ids(finalize(sfm, 100)), (std::vector<std::string>{"Y", "Z"}));
}

TEST(Finalize, TieBrokenById) {
  std::vector<FileMinerProfile> sfm{fm("b", 1, 100), fm("a", 1, 100)};
  EXPECT_EQ(ids(finalize(sfm, 50)), (std::vector<std::string>{"a"}));
}

TEST(Finalize, InsufficientCapacity) {
  std::vector<FileMinerProfile> sfm{fm("M2", 1, 40)};
  EXPECT_EQ(error_of([&] { finalize(sfm, 100); }), Errc::InsufficientCapacity);
}

TEST(Finalize, ExactFit) {
  std::vector<FileMinerProfile> sfm{fm("A", 1, 100), fm("B", 2, 100)};
  EXPECT_EQ(ids(finalize(sfm, 100)), (std::vector<std::string>{"A"}));
}

TEST(Allot, WorkedExample) {
  std::vector<FileMinerProfile> f{fm("M2", 1, 40), fm("M3", 2, 100)};
  EXPECT_EQ(allot(f, 100), (std::vector<Allotment>{{"M2", 40, 1}, {"M3", 60, 2}}));
}

TEST(Allot, ExactFitSingle) {
  std::vector<FileMinerProfile> f{fm("A", 1, 100)};
  EXPECT_EQ(allot(f, 100), (std::vector<Allotment>{{"A", 100, 1}}));
}

TEST(Allot, ThreeWaySplit) {
  std::vector<FileMinerProfile> f{fm("A", 1, 30), fm("B", 1, 30), fm("C", 1, 90)};
  EXPECT_EQ(allot(f, 75), (std::vector<Allotment>{{"A", 30, 1}, {"B", 30, 1}, {"C", 15, 1}}));
}

TEST(Allot, ExtraMinersAfterCoverageGetNothing) {
  std::vector<FileMinerProfile> f{fm("A", 1, 50), fm("B", 1, 50), fm("C", 1, 50)};
  EXPECT_EQ(allot(f, 100), (std::vector<Allotment>{{"A", 50, 1}, {"B", 50, 1}}));
}

TEST(PlanCost, Examples) {
  std::vector<Allotment> two{{"M2", 40, 1}, {"M3", 60, 2}};
  EXPECT_EQ(plan_cost(two), 160);
  std::vector<Allotment> zero{{"A", 100, 0}};
  EXPECT_EQ(plan_cost(zero), 0);
  Coin f = Coin(3) / 7;
  std::vector<Allotment> uniform{{"A", 10, f}, {"B", 25, f}, {"C", 65, f}};
  EXPECT_EQ(plan_cost(uniform), 100 * f);
}

TEST(Allocate, WorkedTrace) {
  auto reg = worked_registry();
  AllocationPlan plan = allocate(reg, {100, 250, 3});
  EXPECT_EQ(plan.entries, (std::vector<Allotment>{{"M2", 40, 1}, {"M3", 60, 2}}));
  EXPECT_EQ(plan.total_cost, 160);
  auto cands = oracle::candidate_filter(to_oracle(reg), unit_budget(250, 100), 3);
  EXPECT_EQ(oracle::brute_force_min_cost(cands, 100), Coin(160));
}

TEST(Allocate, ZeroBudgetWithPaidMiners) {
  auto reg = worked_registry();
  EXPECT_EQ(error_of([&] { allocate(reg, {100, 0, 3}); }), Errc::NoCandidates);
}

TEST(Allocate, CostExactlyEqualsBudget) {
  std::vector<FileMinerProfile> reg{fm("only", 1, 1000)};
  AllocationPlan plan = allocate(reg, {100, 100, 1});
  EXPECT_EQ(plan.entries, (std::vector<Allotment>{{"only", 100, 1}}));
  EXPECT_EQ(plan.total_cost, 100);
}

TEST(Allocate, BudgetBoundOverRandomInstances) {
  std::mt19937_64 rng(11);
  int successes = 0;
  for (int i = 0; i < 1000; ++i) {
    auto inst = fixtures::random_allocation(rng);
    AllocationPlan plan;
    try {
      plan = allocate(inst.miners, inst.request);
    } catch (const Error& e) {
      ASSERT_TRUE(e.code() == Errc::NoCandidates || e.code() == Errc::InsufficientCapacity) << e.what();
      continue;
    }
    ++successes;
    ASSERT_LE(plan.total_cost, inst.request.budget);
    std::uint64_t total = 0;
    for (const auto& a : plan.entries) {
      total += a.allotted;
      auto it = std::find_if(inst.miners.begin(), inst.miners.end(),
                             [&](const auto& m) { return m.miner_id == a.miner_id; });
      ASSERT_NE(it, inst.miners.end());
      ASSERT_LE(a.allotted, it->free_space);
      ASSERT_GT(a.allotted, 0u);
    }
    ASSERT_EQ(total, inst.request.file_size);
    ASSERT_EQ(plan.total_cost, plan_cost(plan.entries));
  }
  EXPECT_GT(successes, 100);
}

TEST(Allocate, GreedyMatchesBruteForceOnSmallCandidateSets) {
  std::mt19937_64 rng(5);
  int compared = 0;
  for (int i = 0; i < 400; ++i) {
    auto inst = fixtures::random_allocation(rng, 12);
    inst.request.threshold = std::min<std::size_t>(inst.request.threshold, 8);
    Coin b = unit_budget(inst.request.budget, inst.request.file_size);
    auto cands = oracle::candidate_filter(to_oracle(inst.miners), b, inst.request.threshold);
    auto best = oracle::brute_force_min_cost(cands, inst.request.file_size);
    try {
      AllocationPlan plan = allocate(inst.miners, inst.request);
      ASSERT_TRUE(best.has_value());
      ASSERT_EQ(plan.total_cost, *best);
      ++compared;
    } catch (const Error& e) {
      ASSERT_FALSE(best.has_value()) << e.what();
    }
  }
  EXPECT_GT(compared, 50);
}

TEST(Registry, ParsesJsonLines) {
  std::istringstream in(
      "{\"miner_id\":\"M1\",\"fee\":3,\"free_space\":50}\n"
      "\n"
      "{\"miner_id\":\"M4\",\"fee\":\"5/2\",\"free_space\":0}\n"
      "{\"miner_id\":\"M5\",\"fee\":0.25,\"free_space\":7}\n");
  auto reg = read_miner_registry(in);
  ASSERT_EQ(reg.size(), 3u);
  EXPECT_EQ(reg[1].fee, Coin(5) / 2);
  EXPECT_EQ(reg[2].fee, Coin(1) / 4);
}

TEST(Registry, RejectsMalformedLines) {
  for (const char* bad : {"nope\n", "{\"miner_id\":\"a\",\"fee\":1}\n",
                          "{\"miner_id\":\"a\",\"fee\":-1,\"free_space\":1}\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW(read_miner_registry(in), Error) << bad;
  }
}
