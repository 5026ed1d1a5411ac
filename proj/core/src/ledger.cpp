#include "newstrad/ledger.hpp"

namespace newstrad {

std::string_view tx_kind_name(TxKind kind) noexcept {
  switch (kind) {
    case TxKind::ListingPosted: return "ListingPosted";
    case TxKind::Payment: return "Payment";
    case TxKind::ContractIssued: return "ContractIssued";
    case TxKind::DeliveryCompleted: return "DeliveryCompleted";
    case TxKind::RewardGranted: return "RewardGranted";
    case TxKind::PenaltyImposed: return "PenaltyImposed";
    case TxKind::Refund: return "Refund";
    case TxKind::MinerRegistered: return "MinerRegistered";
    case TxKind::QueryServed: return "QueryServed";
  }
  return "Unknown";
}

std::optional<TxKind> parse_tx_kind(std::string_view name) noexcept {
  for (auto kind : kAllTxKinds) {
    if (tx_kind_name(kind) == name) return kind;
  }
  return std::nullopt;
}

namespace {

template <typename T>
void optional_field(CanonicalWriter& w, const std::optional<T>& value) {
  if (value) {
    w.field(std::uint64_t{1}).field(*value);
  } else {
    w.field(std::uint64_t{0});
  }
}

}  // namespace

Bytes Transaction::signing_bytes() const {
  CanonicalWriter w;
  w.field(tx_kind_name(kind)).field(actor).field(ByteView(actor_key));
  optional_field(w, counterparty);
  optional_field(w, payload.listing);
  optional_field(w, payload.amount);
  optional_field(w, payload.contract);
  optional_field(w, payload.reference);
  w.field(std::uint64_t{payload.attrs.size()});
  for (const auto& [key, value] : payload.attrs) {
    w.field(key).field(value);
  }
  w.field(std::uint64_t{timestamp});
  return w.bytes();
}

Digest Transaction::compute_id() const {
  CanonicalWriter w;
  w.field(ByteView(signing_bytes())).field(ByteView(signature));
  return w.digest();
}

bool Transaction::signature_valid() const {
  try {
    return verify(actor_key, signing_bytes(), signature);
  } catch (const Error&) {
    return false;
  }
}

Transaction make_transaction(const PseudonymousId& actor, TxKind kind,
                             std::optional<Digest> counterparty, Payload payload, Tick timestamp) {
  Transaction tx;
  tx.kind = kind;
  tx.actor = actor.pseudonym();
  tx.actor_key = actor.public_key();
  tx.counterparty = counterparty;
  tx.payload = std::move(payload);
  tx.timestamp = timestamp;
  tx.signature = sign(actor, tx.signing_bytes());
  tx.tx_id = tx.compute_id();
  return tx;
}

bool is_notice(const Transaction& tx) {
  return tx.kind == TxKind::PenaltyImposed &&
         tx.payload.attrs.count(std::string(attr::kNotice)) > 0;
}

Digest Block::compute_hash() const {
  CanonicalWriter w;
  w.field(index).field(prev_hash).field(std::uint64_t{timestamp});
  w.field(std::uint64_t{transactions.size()});
  for (const auto& tx : transactions) {
    w.field(tx.tx_id);
  }
  return w.digest();
}

Block genesis_block() {
  Block g;
  g.index = 0;
  g.prev_hash = Digest::zero();
  g.timestamp = 0;
  g.block_hash = g.compute_hash();
  return g;
}

Chain::Chain() { blocks_.push_back(genesis_block()); }

Chain Chain::from_blocks(std::vector<Block> blocks) {
  Chain chain;
  chain.blocks_.clear();
  chain.blocks_ = std::move(blocks);
  if (chain.blocks_.empty()) {
    chain.blocks_.push_back(genesis_block());
  }
  for (const auto& block : chain.blocks_) {
    chain.index_block(block);
  }
  return chain;
}

void Chain::index_block(const Block& block) {
  std::size_t b = static_cast<std::size_t>(&block - blocks_.data());
  for (std::size_t t = 0; t < block.transactions.size(); ++t) {
    const auto& tx = block.transactions[t];
    seen_tx_ids_.insert(tx.tx_id);
    tx_locations_.try_emplace(tx.tx_id, b, t);
    key_bindings_.try_emplace(tx.actor, tx.actor_key);
    if (tx.kind == TxKind::ListingPosted && tx.payload.listing) {
      seen_digests_.insert(*tx.payload.listing);
      listing_locations_.try_emplace(*tx.payload.listing, b, t);
    }
  }
}

const Block& Chain::append_block(std::vector<Transaction> txs, Tick now) {
  if (txs.empty()) {
    throw Error(Errc::EmptyBatch, "a block must carry at least one transaction");
  }
  if (now < tip().timestamp) {
    throw Error(Errc::InvalidArgument, "block timestamp precedes the chain tip");
  }

  std::set<Digest> batch_digests;
  std::set<Digest> batch_ids;
  std::map<Digest, Bytes> batch_keys;
  for (const auto& tx : txs) {
    if (tx.compute_id() != tx.tx_id) {
      throw Error(Errc::BadSignature, "tx_id does not match transaction content");
    }
    if (!tx.signature_valid()) {
      throw Error(Errc::BadSignature, "signature does not verify for " + tx.actor.hex());
    }
    auto bound = key_bindings_.find(tx.actor);
    if (bound != key_bindings_.end() && bound->second != tx.actor_key) {
      throw Error(Errc::BadSignature, "pseudonym is bound to a different key");
    }
    auto [it, fresh] = batch_keys.try_emplace(tx.actor, tx.actor_key);
    if (!fresh && it->second != tx.actor_key) {
      throw Error(Errc::BadSignature, "pseudonym used with two keys in one batch");
    }
    if (seen_tx_ids_.count(tx.tx_id) || !batch_ids.insert(tx.tx_id).second) {
      throw Error(Errc::DuplicateContent, "transaction " + tx.tx_id.hex() + " already recorded");
    }
    if (tx.kind == TxKind::ListingPosted) {
      if (!tx.payload.listing) {
        throw Error(Errc::InvalidArgument, "ListingPosted without a listing digest");
      }
      if (seen_digests_.count(*tx.payload.listing) || !batch_digests.insert(*tx.payload.listing).second) {
        throw Error(Errc::DuplicateContent, "listing " + tx.payload.listing->hex() + " already recorded");
      }
    }
  }

  Block block;
  block.index = blocks_.size();
  block.prev_hash = tip().block_hash;
  block.timestamp = now;
  block.transactions = std::move(txs);
  block.block_hash = block.compute_hash();
  blocks_.push_back(std::move(block));
  index_block(blocks_.back());
  return blocks_.back();
}

bool Chain::has_listing(const Digest& listing_id) const { return seen_digests_.count(listing_id) > 0; }

const Transaction* Chain::find_listing(const Digest& listing_id) const {
  auto it = listing_locations_.find(listing_id);
  if (it == listing_locations_.end()) return nullptr;
  return &blocks_[it->second.first].transactions[it->second.second];
}

const Transaction* Chain::find_transaction(const Digest& tx_id) const {
  auto it = tx_locations_.find(tx_id);
  if (it == tx_locations_.end()) return nullptr;
  return &blocks_[it->second.first].transactions[it->second.second];
}

std::size_t Chain::transaction_count() const {
  std::size_t n = 0;
  for (const auto& b : blocks_) n += b.transactions.size();
  return n;
}

VerificationReport verify_blocks(std::span<const Block> blocks) {
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Block& block = blocks[i];
    bool ok = block.index == i;
    if (ok) {
      ok = i == 0 ? block.prev_hash.is_zero() : block.prev_hash == blocks[i - 1].block_hash;
    }
    for (std::size_t t = 0; ok && t < block.transactions.size(); ++t) {
      const auto& tx = block.transactions[t];
      ok = tx.compute_id() == tx.tx_id && tx.signature_valid();
    }
    if (ok) {
      ok = block.compute_hash() == block.block_hash;
    }
    if (!ok) {
      return VerificationReport{false, i};
    }
  }
  return VerificationReport{true, std::nullopt};
}

VerificationReport verify_chain(const Chain& chain) { return verify_blocks(chain.blocks()); }

std::vector<Transaction> query_history(const Chain& chain, const HistoryFilter& filter) {
  std::vector<Transaction> out;
  for (const auto& block : chain.blocks()) {
    for (const auto& tx : block.transactions) {
      if (filter.actor && tx.actor != *filter.actor) continue;
      if (filter.kind && tx.kind != *filter.kind) continue;
      if (filter.listing && tx.payload.listing != filter.listing) continue;
      if (filter.time_range &&
          (tx.timestamp < filter.time_range->first || tx.timestamp > filter.time_range->last)) {
        continue;
      }
      out.push_back(tx);
    }
  }
  return out;
}

CoinFlow coin_flow(const Transaction& tx) {
  CoinFlow flow;
  if (!tx.payload.amount) return flow;
  const Coin& amount = *tx.payload.amount;
  switch (tx.kind) {
    case TxKind::Payment:
      if (tx.counterparty) {
        flow.deltas.emplace_back(tx.actor, -amount);
        flow.deltas.emplace_back(*tx.counterparty, amount);
      }
      break;
    case TxKind::RewardGranted:
      flow.deltas.emplace_back(tx.actor, amount);
      if (tx.counterparty) {
        flow.deltas.emplace_back(*tx.counterparty, -amount);
      } else {
        flow.minted = amount;
      }
      break;
    case TxKind::PenaltyImposed:
      if (tx.counterparty) {
        flow.deltas.emplace_back(*tx.counterparty, -amount);
        flow.burned = amount;
      }
      break;
    case TxKind::Refund: {
      auto debtor = tx.payload.attrs.find(std::string(attr::kDebtor));
      if (tx.counterparty && debtor != tx.payload.attrs.end()) {
        flow.deltas.emplace_back(Digest::from_hex(debtor->second), -amount);
        flow.deltas.emplace_back(*tx.counterparty, amount);
      }
      break;
    }
    default:
      break;
  }
  return flow;
}

}  // namespace newstrad
