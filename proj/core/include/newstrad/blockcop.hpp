#pragma once

#include <optional>
#include <string>
#include <vector>

#include "newstrad/common.hpp"
#include "newstrad/identity.hpp"
#include "newstrad/ledger.hpp"
#include "newstrad/storage.hpp"

namespace newstrad {

enum class ComplaintKind { SellerNoDelivery, FileMinerNoService };

std::string_view complaint_kind_name(ComplaintKind kind) noexcept;
std::optional<ComplaintKind> parse_complaint_kind(std::string_view name) noexcept;

struct Complaint {
  Digest complainant;
  Digest accused;
  Digest listing_id;
  Tick filed_at = 0;
  ComplaintKind kind = ComplaintKind::SellerNoDelivery;
};

enum class VerdictOutcome { Clean, NoticePending, Penalized };

std::string_view verdict_outcome_name(VerdictOutcome outcome) noexcept;

struct Verdict {
  VerdictOutcome outcome = VerdictOutcome::Clean;
  std::optional<Tick> deadline;  ///< NoticePending only
  Coin penalty = 0;              ///< Penalized only
  Coin refund = 0;               ///< Penalized seller only
  /// Ledger transactions the audit examined.
  std::vector<Digest> evidence;
  /// Transactions this audit appended (notice, penalty, refund).
  std::vector<Digest> appended;
};

struct AuditPolicy {
  Tick deadline_window = 50;
  Coin penalty_multiplier = 2;
};

/// A failed chunk fetch observed while collecting a delivery.
struct FetchFailure {
  MinerId miner_id;
  Digest chunk_digest;
  Tick at = 0;
  Errc error = Errc::ChunkMissing;
};

/// Seller-side audit. A Payment backed by both ContractIssued and
/// DeliveryCompleted is clean. Otherwise the first audit posts a notice with a
/// deadline; an audit after that deadline penalizes the seller
/// (multiplier x price, burned) and refunds the price from seller to buyer.
/// Re-auditing a penalized case appends nothing.
/// Throws Error(NoSuchPayment), or Error(InvalidArgument) for a malformed complaint.
Verdict audit_sale(const PseudonymousId& cop, Chain& chain, const Complaint& complaint, Tick now,
                   const AuditPolicy& policy = {});

/// File-miner audit. A miner that was paid for chunks of the listing and then
/// failed a fetch before the chunk's deletion timer ran out is penalized
/// (multiplier x fees received). Throws Error(NoSuchService) when the miner
/// was never paid for the listing.
Verdict audit_file_miner(const PseudonymousId& cop, Chain& chain, const Complaint& complaint, Tick now,
                         std::span<const FetchFailure> failures, const AuditPolicy& policy = {});

}  // namespace newstrad
