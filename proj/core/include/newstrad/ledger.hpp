#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "newstrad/common.hpp"
#include "newstrad/identity.hpp"

namespace newstrad {

enum class TxKind : std::uint8_t {
  ListingPosted,
  Payment,
  ContractIssued,
  DeliveryCompleted,
  RewardGranted,
  PenaltyImposed,
  Refund,
  MinerRegistered,
  QueryServed,
};

inline constexpr std::array kAllTxKinds = {
    TxKind::ListingPosted,  TxKind::Payment,        TxKind::ContractIssued,
    TxKind::DeliveryCompleted, TxKind::RewardGranted, TxKind::PenaltyImposed,
    TxKind::Refund,         TxKind::MinerRegistered, TxKind::QueryServed,
};

std::string_view tx_kind_name(TxKind kind) noexcept;
std::optional<TxKind> parse_tx_kind(std::string_view name) noexcept;

/// Kind-specific record carried by a transaction. Only digests, pseudonyms,
/// amounts and short public attributes (headline, teaser, category) go here.
struct Payload {
  std::optional<Digest> listing;
  std::optional<Coin> amount;
  std::optional<Digest> contract;
  /// Another transaction this one refers to (payment under audit, prior reward).
  std::optional<Digest> reference;
  std::map<std::string, std::string> attrs;

  bool operator==(const Payload&) const = default;
};

// Well-known attribute keys.
namespace attr {
inline constexpr std::string_view kHeadline = "headline";
inline constexpr std::string_view kTeaser = "teaser";
inline constexpr std::string_view kCategory = "category";
inline constexpr std::string_view kPrice = "price";
inline constexpr std::string_view kContentSize = "content_size";
inline constexpr std::string_view kChunk = "chunk";
inline constexpr std::string_view kNotice = "notice";
inline constexpr std::string_view kDeadline = "deadline";
inline constexpr std::string_view kDebtor = "debtor";
inline constexpr std::string_view kRole = "role";
inline constexpr std::string_view kQuery = "query";
inline constexpr std::string_view kReason = "reason";
}  // namespace attr

struct Transaction {
  Digest tx_id;
  TxKind kind = TxKind::Payment;
  Digest actor;
  /// The actor's Ed25519 public key; lets a dump be verified on its own.
  Bytes actor_key;
  std::optional<Digest> counterparty;
  Payload payload;
  Tick timestamp = 0;
  Bytes signature;

  /// Canonical encoding of every field except signature and tx_id.
  Bytes signing_bytes() const;
  /// Digest over the signing bytes followed by the signature.
  Digest compute_id() const;
  bool signature_valid() const;

  bool operator==(const Transaction&) const = default;
};

/// Builds, signs and identifies a transaction on behalf of `actor`.
Transaction make_transaction(const PseudonymousId& actor, TxKind kind,
                             std::optional<Digest> counterparty, Payload payload, Tick timestamp);

/// A zero-amount PenaltyImposed carrying attrs.notice is a deadline notice,
/// not a penalty.
bool is_notice(const Transaction& tx);

struct Block {
  std::uint64_t index = 0;
  Digest prev_hash;
  Tick timestamp = 0;
  std::vector<Transaction> transactions;
  Digest block_hash;

  Digest compute_hash() const;

  bool operator==(const Block&) const = default;
};

/// Index 0, all-zero prev_hash, tick 0, no transactions.
Block genesis_block();

struct VerificationReport {
  bool valid = true;
  std::optional<std::uint64_t> first_bad_index;

  bool operator==(const VerificationReport&) const = default;
};

/// Append-only block store. One appender at a time; a const Chain may be
/// read from any number of threads.
class Chain {
 public:
  Chain();

  /// Rebuilds a chain from stored blocks (e.g. a parsed dump) without
  /// validating them; call verify_chain on the result.
  static Chain from_blocks(std::vector<Block> blocks);

  /// Validates and appends. Throws Error(EmptyBatch), Error(BadSignature) or
  /// Error(DuplicateContent); the chain is unchanged on failure.
  const Block& append_block(std::vector<Transaction> txs, Tick now);

  const std::vector<Block>& blocks() const { return blocks_; }
  const Block& tip() const { return blocks_.back(); }
  std::size_t size() const { return blocks_.size(); }

  bool has_listing(const Digest& listing_id) const;
  /// The ListingPosted transaction for a listing, if recorded.
  const Transaction* find_listing(const Digest& listing_id) const;
  const Transaction* find_transaction(const Digest& tx_id) const;

  std::size_t transaction_count() const;

 private:
  void index_block(const Block& block);

  std::vector<Block> blocks_;
  std::set<Digest> seen_digests_;
  std::set<Digest> seen_tx_ids_;
  std::map<Digest, Bytes> key_bindings_;
  std::map<Digest, std::pair<std::size_t, std::size_t>> tx_locations_;
  std::map<Digest, std::pair<std::size_t, std::size_t>> listing_locations_;
};

VerificationReport verify_chain(const Chain& chain);
VerificationReport verify_blocks(std::span<const Block> blocks);

struct TickRange {
  Tick first = 0;
  Tick last = 0;  // inclusive
};

struct HistoryFilter {
  std::optional<Digest> actor;
  std::optional<TxKind> kind;
  std::optional<Digest> listing;
  std::optional<TickRange> time_range;
};

/// Transactions matching every supplied field, in chain order.
std::vector<Transaction> query_history(const Chain& chain, const HistoryFilter& filter);

/// Coin movements implied by one transaction. Transfers debit one pseudonym
/// and credit another; reward minting and penalty burning are reported apart.
struct CoinFlow {
  std::vector<std::pair<Digest, Coin>> deltas;
  Coin minted = 0;
  Coin burned = 0;
};

CoinFlow coin_flow(const Transaction& tx);

}  // namespace newstrad
