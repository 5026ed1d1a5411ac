#include "newstrad/blockcop.hpp"

#include <algorithm>
#include <set>

namespace newstrad {

std::string_view complaint_kind_name(ComplaintKind kind) noexcept {
  switch (kind) {
    case ComplaintKind::SellerNoDelivery: return "SellerNoDelivery";
    case ComplaintKind::FileMinerNoService: return "FileMinerNoService";
  }
  return "Unknown";
}

std::optional<ComplaintKind> parse_complaint_kind(std::string_view name) noexcept {
  if (name == "SellerNoDelivery") return ComplaintKind::SellerNoDelivery;
  if (name == "FileMinerNoService") return ComplaintKind::FileMinerNoService;
  return std::nullopt;
}

std::string_view verdict_outcome_name(VerdictOutcome outcome) noexcept {
  switch (outcome) {
    case VerdictOutcome::Clean: return "Clean";
    case VerdictOutcome::NoticePending: return "NoticePending";
    case VerdictOutcome::Penalized: return "Penalized";
  }
  return "Unknown";
}

namespace {

constexpr std::string_view kSellerReason = "seller-no-delivery";
constexpr std::string_view kMinerReason = "file-miner-no-service";

void check_complaint(const Complaint& c, ComplaintKind expected) {
  if (c.kind != expected) {
    throw Error(Errc::InvalidArgument, "complaint kind does not match this audit");
  }
  if (c.complainant == c.accused) {
    throw Error(Errc::InvalidArgument, "a participant cannot accuse itself");
  }
}

bool has_attr(const Transaction& tx, std::string_view key) {
  return tx.payload.attrs.count(std::string(key)) > 0;
}

std::string attr_of(const Transaction& tx, std::string_view key) {
  auto it = tx.payload.attrs.find(std::string(key));
  return it == tx.payload.attrs.end() ? std::string() : it->second;
}

template <typename Pred>
std::vector<Transaction> find_all(const Chain& chain, const HistoryFilter& f, Pred pred) {
  auto all = query_history(chain, f);
  std::vector<Transaction> out;
  std::copy_if(all.begin(), all.end(), std::back_inserter(out), pred);
  return out;
}

}  // namespace

Verdict audit_sale(const PseudonymousId& cop, Chain& chain, const Complaint& complaint, Tick now,
                   const AuditPolicy& policy) {
  check_complaint(complaint, ComplaintKind::SellerNoDelivery);
  const Digest& buyer = complaint.complainant;
  const Digest& seller = complaint.accused;
  const Digest& listing = complaint.listing_id;

  auto payments = find_all(chain, {.actor = buyer, .kind = TxKind::Payment, .listing = listing},
                           [&](const Transaction& tx) {
                             return tx.counterparty == seller && !has_attr(tx, attr::kChunk);
                           });
  if (payments.empty()) {
    throw Error(Errc::NoSuchPayment, "no payment from complainant to accused for this listing");
  }
  const Transaction& payment = payments.front();
  Verdict v;
  v.evidence.push_back(payment.tx_id);

  auto contracts = find_all(chain, {.actor = seller, .kind = TxKind::ContractIssued, .listing = listing},
                            [&](const Transaction& tx) { return tx.counterparty == buyer; });
  for (const auto& contract : contracts) {
    auto deliveries =
        find_all(chain, {.actor = buyer, .kind = TxKind::DeliveryCompleted, .listing = listing},
                 [&](const Transaction& tx) { return tx.payload.contract == contract.payload.contract; });
    if (!deliveries.empty()) {
      v.outcome = VerdictOutcome::Clean;
      v.evidence.push_back(contract.tx_id);
      v.evidence.push_back(deliveries.front().tx_id);
      return v;
    }
  }

  // Idempotence: an earlier penalty for this payment settles the case.
  auto penalties = find_all(chain, {.actor = cop.pseudonym(), .kind = TxKind::PenaltyImposed, .listing = listing},
                            [&](const Transaction& tx) {
                              return tx.payload.reference == payment.tx_id && tx.counterparty == seller;
                            });
  const Transaction* notice = nullptr;
  for (const auto& p : penalties) {
    if (is_notice(p)) {
      notice = notice ? notice : &p;
      continue;
    }
    v.outcome = VerdictOutcome::Penalized;
    v.penalty = p.payload.amount.value_or(0);
    v.evidence.push_back(p.tx_id);
    auto refunds = find_all(chain, {.actor = cop.pseudonym(), .kind = TxKind::Refund, .listing = listing},
                            [&](const Transaction& tx) { return tx.payload.reference == payment.tx_id; });
    for (const auto& r : refunds) {
      v.refund += r.payload.amount.value_or(0);
      v.evidence.push_back(r.tx_id);
    }
    return v;
  }

  if (!notice) {
    Tick deadline = now + policy.deadline_window;
    Payload p;
    p.listing = listing;
    p.amount = Coin(0);
    p.reference = payment.tx_id;
    p.attrs.emplace(attr::kNotice, "1");
    p.attrs.emplace(attr::kDeadline, std::to_string(deadline));
    p.attrs.emplace(attr::kReason, kSellerReason);
    auto tx = make_transaction(cop, TxKind::PenaltyImposed, seller, std::move(p), now);
    v.appended.push_back(tx.tx_id);
    chain.append_block({std::move(tx)}, now);
    v.outcome = VerdictOutcome::NoticePending;
    v.deadline = deadline;
    return v;
  }

  v.evidence.push_back(notice->tx_id);
  Tick deadline = std::stoull(attr_of(*notice, attr::kDeadline));
  if (now <= deadline) {
    v.outcome = VerdictOutcome::NoticePending;
    v.deadline = deadline;
    return v;
  }

  Coin price = payment.payload.amount.value_or(0);
  Coin penalty = policy.penalty_multiplier * price;

  Payload pen;
  pen.listing = listing;
  pen.amount = penalty;
  pen.reference = payment.tx_id;
  pen.attrs.emplace(attr::kReason, kSellerReason);
  auto penalty_tx = make_transaction(cop, TxKind::PenaltyImposed, seller, std::move(pen), now);

  Payload ref;
  ref.listing = listing;
  ref.amount = price;
  ref.reference = payment.tx_id;
  ref.attrs.emplace(attr::kDebtor, seller.hex());
  auto refund_tx = make_transaction(cop, TxKind::Refund, buyer, std::move(ref), now);

  v.appended = {penalty_tx.tx_id, refund_tx.tx_id};
  chain.append_block({std::move(penalty_tx), std::move(refund_tx)}, now);
  v.outcome = VerdictOutcome::Penalized;
  v.penalty = penalty;
  v.refund = price;
  return v;
}

Verdict audit_file_miner(const PseudonymousId& cop, Chain& chain, const Complaint& complaint, Tick now,
                         std::span<const FetchFailure> failures, const AuditPolicy& policy) {
  check_complaint(complaint, ComplaintKind::FileMinerNoService);
  const Digest& miner = complaint.accused;
  const Digest& listing = complaint.listing_id;

  auto fees = find_all(chain, {.kind = TxKind::Payment, .listing = listing}, [&](const Transaction& tx) {
    return tx.counterparty == miner && has_attr(tx, attr::kChunk);
  });
  if (fees.empty()) {
    throw Error(Errc::NoSuchService, "accused miner was never paid for this listing");
  }

  Verdict v;
  std::set<Digest> paid_chunks;
  std::set<Digest> fee_ids;
  Coin fees_received = 0;
  for (const auto& f : fees) {
    v.evidence.push_back(f.tx_id);
    fee_ids.insert(f.tx_id);
    fees_received += f.payload.amount.value_or(0);
    paid_chunks.insert(Digest::from_hex(attr_of(f, attr::kChunk)));
  }

  auto earlier = find_all(chain, {.actor = cop.pseudonym(), .kind = TxKind::PenaltyImposed, .listing = listing},
                          [&](const Transaction& tx) {
                            return !is_notice(tx) && tx.counterparty == miner && tx.payload.reference &&
                                   fee_ids.count(*tx.payload.reference);
                          });
  if (!earlier.empty()) {
    v.outcome = VerdictOutcome::Penalized;
    v.penalty = earlier.front().payload.amount.value_or(0);
    v.evidence.push_back(earlier.front().tx_id);
    return v;
  }

  std::string miner_hex = miner.hex();
  bool failed = std::any_of(failures.begin(), failures.end(), [&](const FetchFailure& f) {
    return f.miner_id == miner_hex && f.error == Errc::ChunkMissing && paid_chunks.count(f.chunk_digest);
  });
  if (!failed) {
    v.outcome = VerdictOutcome::Clean;
    return v;
  }

  Coin penalty = policy.penalty_multiplier * fees_received;
  Payload pen;
  pen.listing = listing;
  pen.amount = penalty;
  pen.reference = fees.front().tx_id;
  pen.attrs.emplace(attr::kReason, kMinerReason);
  auto tx = make_transaction(cop, TxKind::PenaltyImposed, miner, std::move(pen), now);
  v.appended.push_back(tx.tx_id);
  chain.append_block({std::move(tx)}, now);
  v.outcome = VerdictOutcome::Penalized;
  v.penalty = penalty;
  return v;
}

}  // namespace newstrad
