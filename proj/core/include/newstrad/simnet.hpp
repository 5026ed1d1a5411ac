#pragma once

#include <map>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "newstrad/blockcop.hpp"
#include "newstrad/delivery.hpp"
#include "newstrad/identity.hpp"
#include "newstrad/ledger.hpp"
#include "newstrad/market.hpp"
#include "newstrad/storage.hpp"

namespace newstrad {

enum class Role { Seller, Buyer, NewsMiner, FileMiner, BlockCop };

std::string_view role_name(Role role) noexcept;
std::optional<Role> parse_role(std::string_view name) noexcept;

struct ActorSpec {
  std::string name;
  Role role = Role::Buyer;
  Coin balance = 0;
  SignatureInputs identity;
  Tick latency = 0;               ///< news miners
  Coin fee = 0;                   ///< file miners, coin per byte
  std::uint64_t free_space = 0;   ///< file miners
};

// Closed set of scripted operations. Names refer to ActorSpec::name; listing
// and query labels are scenario-local handles.
namespace action {

struct PostListing {
  std::string seller;
  std::string listing;
  std::string headline;
  std::string teaser;
  std::string category;
  Coin price = 0;
  /// Full content; when absent, content_size seeded random bytes are used
  /// with the teaser spliced in at the front.
  std::optional<std::string> content;
  std::uint64_t content_size = 0;
};

struct IssueQuery {
  std::string buyer;
  std::string query;
  std::string text;
  std::optional<std::string> category;
  Coin coin = 0;
};

struct Requery {
  std::string query;
  bool satisfied = false;
};

struct Purchase {
  std::string buyer;
  std::string listing;
};

struct Deliver {
  std::string listing;
  std::string buyer;
  Coin budget = 0;
  std::size_t threshold = 1;
};

struct Retrieve {
  std::string listing;
  std::string buyer;
};

/// A file miner silently drops its chunks of one delivery.
struct DropChunks {
  std::string miner;
  std::string listing;
  std::string buyer;
};

struct FileComplaint {
  std::string complainant;
  std::string accused;
  std::string listing;
  ComplaintKind kind = ComplaintKind::SellerNoDelivery;
};

}  // namespace action

using Action = std::variant<action::PostListing, action::IssueQuery, action::Requery, action::Purchase,
                            action::Deliver, action::Retrieve, action::DropChunks, action::FileComplaint>;

std::string_view action_name(const Action& a) noexcept;

struct Event {
  Tick at = 0;
  std::uint64_t seq = 0;  ///< assigned by schedule(); insertion order within a tick
  Action action;
};

struct SimConfig {
  std::uint64_t seed = 0;
  Tick t_R = 100;
  Tick t_D = 1000;
  AuditPolicy audit;
  Coin listing_reward = kDefaultListingReward;
};

struct ActorBalance {
  std::string name;
  Digest pseudonym;
  Role role = Role::Buyer;
  Coin initial = 0;
  Coin balance = 0;
};

struct QueryRecord {
  Tick at = 0;
  std::string query;
  std::string buyer;
  bool requery = false;
  std::optional<std::string> decision;  ///< requery events only
  std::optional<Digest> serving_miner;
  std::size_t results = 0;
  Coin fee_charged = 0;
};

struct DeliveryRecord {
  Tick delivered_at = 0;
  std::string listing;
  std::string buyer;
  Digest original_digest;
  std::uint64_t ciphertext_size = 0;
  Coin budget = 0;
  AllocationPlan plan;
  Digest contract_digest;
  std::string contract_json;
  std::optional<Tick> retrieved_at;
  std::optional<Digest> delivered_digest;
};

struct VerdictRecord {
  Tick at = 0;
  std::string complainant;
  std::string accused;
  std::string listing;
  ComplaintKind kind = ComplaintKind::SellerNoDelivery;
  std::optional<Verdict> verdict;
  std::optional<std::string> error;
};

struct EventError {
  Tick at = 0;
  std::uint64_t seq = 0;
  std::string op;
  std::string error;
};

struct SimulationReport {
  std::uint64_t seed = 0;
  SimConfig config;
  Tick final_tick = 0;
  Chain chain;
  VerificationReport verification;
  std::vector<ActorBalance> balances;
  std::vector<QueryRecord> queries;
  std::vector<DeliveryRecord> deliveries;
  std::vector<VerdictRecord> verdicts;
  std::vector<FetchFailure> fetch_failures;
  std::vector<EventError> errors;
  Coin minted = 0;
  Coin burned = 0;
  std::vector<std::string> invariant_failures;

  bool invariants_hold() const { return invariant_failures.empty(); }
};

/// Report as a JSON document (keys sorted, so byte-stable for a given run).
std::string report_to_json(const SimulationReport& report);

/// Deterministic discrete-event simulation over all protocol modules.
///
/// Events run in (at, seq) order on a single thread; the whole run is a pure
/// function of the actor list, the events and the config seed. Actor-level
/// failures are recorded in the report, never thrown.
class Simulation {
 public:
  /// Throws Error(BadScenario) for duplicate names, more than one block cop,
  /// or invalid identity inputs. A block cop is created when none is given.
  Simulation(std::vector<ActorSpec> actors, SimConfig config);

  /// Queues an event and returns its seq. Throws Error(PastEvent).
  std::uint64_t schedule(Tick at, Action action);

  /// Executes every queued event with at <= until, then checks invariants.
  SimulationReport run(Tick until);
  /// Runs every queued event.
  SimulationReport run();

  Tick now() const { return now_; }
  const Chain& chain() const { return chain_; }
  std::size_t pending_events() const { return queue_.size(); }

  /// Initial balance plus every ledger amount touching the pseudonym.
  /// Throws Error(UnknownActor).
  Coin balance_of(const Digest& pseudonym) const;
  Coin balance_of(std::string_view name) const;
  const PseudonymousId& identity_of(std::string_view name) const;

  /// Balances recomputed from the chain alone.
  std::map<Digest, Coin> ledger_balances() const;

 private:
  struct Actor {
    ActorSpec spec;
    PseudonymousId id;
  };
  struct ListingState {
    NewsListing listing;
    Bytes content;
    std::string seller;
  };
  struct QueryState {
    Query query;
    std::string buyer;
    Digest last_server;
  };
  struct DeliveryState {
    DeliveryContract contract;
    Digest seller;
    std::size_t record = 0;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.at != b.at ? a.at > b.at : a.seq > b.seq;
    }
  };

  const Actor& actor(std::string_view name) const;
  const Actor& actor(std::string_view name, Role role) const;
  const ListingState& listing(const std::string& label) const;
  void register_miners();
  void execute(const Event& e);
  void absorb_new_blocks();
  void check_conservation();
  void check_final(SimulationReport& report) const;

  void apply(const action::PostListing& a);
  void apply(const action::IssueQuery& a);
  void apply(const action::Requery& a);
  void apply(const action::Purchase& a);
  void apply(const action::Deliver& a);
  void apply(const action::Retrieve& a);
  void apply(const action::DropChunks& a);
  void apply(const action::FileComplaint& a);

  SimConfig config_;
  std::vector<Actor> actors_;
  std::map<std::string, std::size_t, std::less<>> by_name_;
  std::map<Digest, std::size_t> by_pseudonym_;
  KeyRing keys_;
  std::mt19937_64 rng_;

  Chain chain_;
  MinerPool news_miners_;
  ChunkStore chunk_store_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t next_seq_ = 0;
  Tick now_ = 0;

  std::map<Digest, Coin> balances_;
  std::size_t absorbed_blocks_ = 1;
  Coin initial_total_ = 0;
  Coin minted_ = 0;
  Coin burned_ = 0;

  std::map<std::string, ListingState> listings_;
  std::map<std::string, QueryState> queries_;
  std::map<std::pair<std::string, std::string>, DeliveryState> deliveries_;

  std::vector<QueryRecord> query_log_;
  std::vector<DeliveryRecord> delivery_log_;
  std::vector<VerdictRecord> verdict_log_;
  std::vector<FetchFailure> fetch_failures_;
  std::vector<EventError> errors_;
  std::vector<std::string> invariant_failures_;
};

}  // namespace newstrad
