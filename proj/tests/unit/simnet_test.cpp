#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "newstrad/ledger_json.hpp"
#include "newstrad/scenario.hpp"
#include "newstrad/simnet.hpp"

using namespace newstrad;

namespace {

ActorSpec person(const std::string& name, Role role, Coin balance) {
  ActorSpec a;
  a.name = name;
  a.role = role;
  a.balance = balance;
  a.identity = fixtures::inputs_for(name);
  return a;
}

ActorSpec news_miner(const std::string& name, Tick latency) {
  ActorSpec a = person(name, Role::NewsMiner, 0);
  a.latency = latency;
  return a;
}

ActorSpec file_miner(const std::string& name, Coin fee, std::uint64_t space) {
  ActorSpec a = person(name, Role::FileMiner, 0);
  a.fee = fee;
  a.free_space = space;
  return a;
}

std::vector<ActorSpec> market() {
  return {person("seller", Role::Seller, 1000), person("buyer", Role::Buyer, 500),
          news_miner("nm1", 3), news_miner("nm2", 5),
          file_miner("fm1", Coin(1) / 100, 5000), file_miner("fm2", Coin(1) / 50, 5000)};
}

action::PostListing story(const std::string& label = "story") {
  action::PostListing p;
  p.seller = "seller";
  p.listing = label;
  p.headline = "Bridge closed";
  p.teaser = "The bridge is shut " + label;
  p.category = "local";
  p.price = 50;
  p.content_size = 500;
  return p;
}

std::size_t count_kind(const Chain& chain, TxKind kind, bool include_notices = false) {
  std::size_t n = 0;
  for (const auto& b : chain.blocks()) {
    for (const auto& tx : b.transactions) {
      if (tx.kind == kind && (include_notices || !is_notice(tx))) ++n;
    }
  }
  return n;
}

Scenario load(const std::string& file) { return load_scenario(fixtures::scenario_dir() / file); }

SimulationReport run_bundled(const std::string& file) {
  Scenario s = load(file);
  SimConfig config;
  s.config.apply_to(config);
  return make_simulation(s, config).run();
}

}  // namespace

TEST(Simulation, EmptyScenarioLeavesGenesisOnly) {
  Simulation sim({person("a", Role::Buyer, 100), person("b", Role::Seller, 7)}, {});
  auto report = sim.run();
  EXPECT_EQ(report.chain.size(), 1u);
  EXPECT_EQ(sim.balance_of("a"), 100);
  EXPECT_EQ(sim.balance_of("b"), 7);
  EXPECT_TRUE(report.invariants_hold());
}

TEST(Simulation, CreatesBlockCopWhenMissing) {
  Simulation sim({person("a", Role::Buyer, 1)}, {});
  EXPECT_NO_THROW(sim.identity_of("blockcop"));
}

TEST(Simulation, RejectsBadActorLists) {
  auto code = [](std::vector<ActorSpec> actors) {
    try {
      Simulation sim(std::move(actors), {});
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::InvalidArgument;
  };
  EXPECT_EQ(code({person("a", Role::Buyer, 1), person("a", Role::Seller, 1)}), Errc::BadScenario);
  EXPECT_EQ(code({person("c1", Role::BlockCop, 0), person("c2", Role::BlockCop, 0)}), Errc::BadScenario);
  EXPECT_EQ(code({person("a", Role::Buyer, -1)}), Errc::BadScenario);
  auto empty_text = person("a", Role::Buyer, 1);
  empty_text.identity.text.clear();
  EXPECT_EQ(code({empty_text}), Errc::BadScenario);
}

TEST(Simulation, SameTickEventsKeepInsertionOrder) {
  Simulation sim(market(), {});
  sim.schedule(1, story("first"));
  sim.schedule(1, story("second"));
  auto report = sim.run();
  std::vector<std::string> teasers;
  for (const auto& b : report.chain.blocks()) {
    for (const auto& tx : b.transactions) {
      if (tx.kind == TxKind::ListingPosted) teasers.push_back(tx.payload.attrs.at("teaser"));
    }
  }
  EXPECT_EQ(teasers, (std::vector<std::string>{"The bridge is shut first", "The bridge is shut second"}));
}

TEST(Simulation, CurrentTickEventRunsBeforeLaterOnes) {
  Simulation sim(market(), {});
  sim.schedule(5, story("later"));
  sim.schedule(2, story("now"));
  sim.run(2);
  EXPECT_EQ(sim.now(), 2u);
  EXPECT_EQ(sim.pending_events(), 1u);
  sim.schedule(2, story("also-now"));
  auto report = sim.run();
  std::vector<std::string> order;
  for (const auto& b : report.chain.blocks()) {
    for (const auto& tx : b.transactions) {
      if (tx.kind == TxKind::ListingPosted) order.push_back(tx.payload.attrs.at("teaser"));
    }
  }
  EXPECT_EQ(order, (std::vector<std::string>{"The bridge is shut now", "The bridge is shut also-now",
                                             "The bridge is shut later"}));
}

TEST(Simulation, PastEventRejected) {
  Simulation sim(market(), {});
  sim.schedule(5, story());
  sim.run();
  try {
    sim.schedule(4, story("late"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::PastEvent);
  }
}

TEST(Simulation, PaymentMovesBalances) {
  Simulation sim(market(), {});
  sim.schedule(1, story());
  sim.schedule(2, action::Purchase{"buyer", "story"});
  auto report = sim.run();
  EXPECT_EQ(sim.balance_of("buyer"), 450);
  EXPECT_EQ(sim.balance_of("seller"), 1050);
  EXPECT_TRUE(report.invariants_hold()) << report.invariant_failures.front();
}

TEST(Simulation, ConservationWithoutMinting) {
  SimConfig config;
  config.listing_reward = 0;
  Simulation sim(market(), config);
  Coin before = 0;
  for (const auto& [_, b] : sim.ledger_balances()) before += b;
  sim.schedule(1, story());
  sim.schedule(2, action::Purchase{"buyer", "story"});
  sim.schedule(3, action::Deliver{"story", "buyer", 40, 2});
  sim.schedule(4, action::Retrieve{"story", "buyer"});
  auto report = sim.run();
  Coin after = 0;
  for (const auto& [_, b] : sim.ledger_balances()) after += b;
  EXPECT_EQ(before, after);
  EXPECT_EQ(report.minted, 0);
  EXPECT_TRUE(report.invariants_hold());
}

TEST(Simulation, FullTradeProducesDeliveryEvidence) {
  Simulation sim(market(), {});
  sim.schedule(1, story());
  sim.schedule(2, action::Purchase{"buyer", "story"});
  sim.schedule(3, action::Deliver{"story", "buyer", 40, 2});
  sim.schedule(4, action::Retrieve{"story", "buyer"});
  auto report = sim.run();
  ASSERT_TRUE(report.errors.empty()) << report.errors.front().error;
  ASSERT_EQ(report.deliveries.size(), 1u);
  const auto& d = report.deliveries[0];
  EXPECT_EQ(d.delivered_digest, d.original_digest);
  EXPECT_LE(d.plan.total_cost, d.budget);
  EXPECT_EQ(d.ciphertext_size, 500u + kEnvelopeOverhead);
  EXPECT_EQ(count_kind(report.chain, TxKind::ContractIssued), 1u);
  EXPECT_EQ(count_kind(report.chain, TxKind::DeliveryCompleted), 1u);
}

TEST(Simulation, RetrievalPastLifetimeExpires) {
  SimConfig config;
  config.t_D = 10;
  Simulation sim(market(), config);
  sim.schedule(1, story());
  sim.schedule(2, action::Deliver{"story", "buyer", 40, 2});
  sim.schedule(3, action::Retrieve{"story", "buyer"});
  sim.schedule(13, action::Retrieve{"story", "buyer"});
  sim.schedule(14, action::Retrieve{"story", "buyer"});
  auto report = sim.run();
  ASSERT_EQ(report.errors.size(), 1u);
  EXPECT_EQ(report.errors[0].at, 14u);
  EXPECT_NE(report.errors[0].error.find("ChunkExpired"), std::string::npos);
  EXPECT_EQ(count_kind(report.chain, TxKind::DeliveryCompleted), 2u);
}

TEST(Simulation, RequeryChainChargesOnce) {
  auto actors = market();
  actors.push_back(news_miner("nm3", 7));
  Simulation sim(actors, {});
  sim.schedule(1, story());
  sim.schedule(2, action::IssueQuery{"buyer", "q", "bridge", std::nullopt, 4});
  sim.schedule(3, action::Requery{"q", false});
  sim.schedule(4, action::Requery{"q", false});
  sim.schedule(5, action::Requery{"q", false});
  auto report = sim.run();
  EXPECT_EQ(sim.balance_of("buyer"), 496);
  // Every miner is excluded after the third server.
  ASSERT_EQ(report.errors.size(), 1u);
  EXPECT_EQ(report.errors[0].at, 5u);
  EXPECT_TRUE(report.invariants_hold());
}

TEST(Simulation, RequeryOutsideWindowStays) {
  SimConfig config;
  config.t_R = 10;
  Simulation sim(market(), config);
  sim.schedule(1, story());
  sim.schedule(2, action::IssueQuery{"buyer", "q", "bridge", std::nullopt, 4});
  sim.schedule(13, action::Requery{"q", false});
  auto report = sim.run();
  ASSERT_EQ(report.queries.size(), 2u);
  EXPECT_EQ(report.queries[1].decision, "StayWithResult");
  EXPECT_EQ(sim.balance_of("buyer"), 496);
}

TEST(Simulation, ActorErrorsAreRecordedNotThrown) {
  Simulation sim(market(), {});
  sim.schedule(1, action::Purchase{"buyer", "nothing"});
  sim.schedule(2, action::Purchase{"nobody", "nothing"});
  auto report = sim.run();
  EXPECT_EQ(report.errors.size(), 2u);
  EXPECT_TRUE(report.invariants_hold());
}

TEST(Simulation, SameSeedSameOutput) {
  auto run_once = [] {
    Simulation sim(market(), {});
    sim.schedule(1, story());
    sim.schedule(2, action::Deliver{"story", "buyer", 40, 2});
    sim.schedule(3, action::Retrieve{"story", "buyer"});
    return sim.run();
  };
  auto a = run_once();
  auto b = run_once();
  EXPECT_EQ(dump_ledger(a.chain), dump_ledger(b.chain));
  EXPECT_EQ(report_to_json(a), report_to_json(b));
}

TEST(Simulation, SeedChangesKeysAndCiphertext) {
  auto run_with = [](std::uint64_t seed) {
    SimConfig c;
    c.seed = seed;
    Simulation sim(market(), c);
    sim.schedule(1, story());
    sim.schedule(2, action::Deliver{"story", "buyer", 40, 2});
    return dump_ledger(sim.run().chain);
  };
  EXPECT_NE(run_with(1), run_with(2));
}

TEST(BundledScenario, HonestTrade) {
  auto report = run_bundled("honest_trade.json");
  ASSERT_TRUE(report.invariants_hold()) << report.invariant_failures.front();
  EXPECT_TRUE(report.errors.empty());
  EXPECT_EQ(count_kind(report.chain, TxKind::PenaltyImposed, true), 0u);
  ASSERT_EQ(report.deliveries.size(), 1u);
  EXPECT_EQ(report.deliveries[0].delivered_digest, report.deliveries[0].original_digest);
  EXPECT_LE(report.deliveries[0].plan.total_cost, report.deliveries[0].budget);
  for (const auto& v : report.verdicts) {
    ASSERT_TRUE(v.verdict);
    EXPECT_EQ(v.verdict->outcome, VerdictOutcome::Clean);
  }

  Digest listing;
  for (const auto& b : report.chain.blocks()) {
    for (const auto& tx : b.transactions) {
      if (tx.kind == TxKind::ListingPosted) listing = *tx.payload.listing;
    }
  }
  HistoryFilter f;
  f.listing = listing;
  f.kind = TxKind::ContractIssued;
  EXPECT_EQ(query_history(report.chain, f).size(), 1u);
  f.kind = TxKind::DeliveryCompleted;
  EXPECT_EQ(query_history(report.chain, f).size(), 1u);
  f.kind = TxKind::Payment;
  EXPECT_GE(query_history(report.chain, f).size(), 2u);
}

TEST(BundledScenario, CheatingSeller) {
  auto report = run_bundled("cheating_seller.json");
  ASSERT_TRUE(report.invariants_hold());
  EXPECT_EQ(count_kind(report.chain, TxKind::PenaltyImposed), 1u);
  EXPECT_EQ(count_kind(report.chain, TxKind::Refund), 1u);
  ASSERT_EQ(report.verdicts.size(), 4u);
  EXPECT_EQ(report.verdicts[0].verdict->outcome, VerdictOutcome::NoticePending);
  EXPECT_EQ(report.verdicts[1].verdict->outcome, VerdictOutcome::NoticePending);
  EXPECT_EQ(report.verdicts[2].verdict->outcome, VerdictOutcome::Penalized);
  EXPECT_EQ(report.verdicts[3].verdict->outcome, VerdictOutcome::Penalized);
  EXPECT_TRUE(report.verdicts[3].verdict->appended.empty());
  for (const auto& b : report.balances) {
    if (b.name == "toma") EXPECT_EQ(b.balance, b.initial);
  }
}

TEST(BundledScenario, VanishingMiner) {
  auto report = run_bundled("vanishing_miner.json");
  ASSERT_TRUE(report.invariants_hold());
  EXPECT_EQ(count_kind(report.chain, TxKind::PenaltyImposed), 1u);
  ASSERT_EQ(report.verdicts.size(), 3u);
  EXPECT_EQ(report.verdicts[0].verdict->outcome, VerdictOutcome::Penalized);
  EXPECT_EQ(report.verdicts[1].verdict->outcome, VerdictOutcome::Penalized);
  EXPECT_TRUE(report.verdicts[1].verdict->appended.empty());
  EXPECT_EQ(report.verdicts[2].verdict->outcome, VerdictOutcome::Clean);
  ASSERT_EQ(report.fetch_failures.size(), 1u);
  EXPECT_EQ(report.fetch_failures[0].error, Errc::ChunkMissing);
}

TEST(ScenarioParser, MalformedJsonNamesLine) {
  try {
    load("malformed.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::BadScenario);
    EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos) << e.what();
  }
}

TEST(ScenarioParser, RejectsUnknownOpAndRole) {
  EXPECT_THROW(parse_scenario(R"({"actors":[{"name":"a","role":"Wizard"}]})"), Error);
  EXPECT_THROW(parse_scenario(R"({"events":[{"at":1,"op":"teleport","args":{}}]})"), Error);
  EXPECT_THROW(parse_scenario(R"([1,2])"), Error);
}

TEST(ScenarioParser, ReadsConfigAndMiners) {
  Scenario s = parse_scenario(R"({
    "name": "x", "seed": 9, "config": {"t_r": 4, "penalty_multiplier": "5/2"},
    "miners": [{"name": "f", "kind": "file", "fee": "1/3", "free_space": 10},
               {"name": "n", "kind": "news", "latency": 2}]})");
  EXPECT_EQ(s.name, "x");
  EXPECT_EQ(s.config.seed, 9u);
  EXPECT_EQ(s.config.t_R, Tick{4});
  EXPECT_EQ(s.config.penalty_multiplier, Coin(5) / 2);
  ASSERT_EQ(s.actors.size(), 2u);
  EXPECT_EQ(s.actors[0].role, Role::FileMiner);
  EXPECT_EQ(s.actors[0].fee, Coin(1) / 3);
  EXPECT_EQ(s.actors[1].latency, 2u);
}
