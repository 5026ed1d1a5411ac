#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "newstrad/common.hpp"
#include "newstrad/identity.hpp"
#include "newstrad/ledger.hpp"

namespace newstrad {

/// A priced news item. Only the teaser is ever exposed; full content stays
/// with the seller and is represented here by its digest and size.
struct NewsListing {
  Digest listing_id;  ///< digest of the full content
  Digest seller;
  std::string headline;
  std::string teaser;
  std::string category;
  Coin price = 0;
  std::uint64_t full_content_size = 0;
};

/// Builds a listing from its full content. The teaser must be a substring of
/// the content and price must be non-negative (Error(InvalidArgument)).
NewsListing make_listing(const Digest& seller, std::string headline, std::string teaser,
                         std::string category, const Coin& price, ByteView content);

struct NewsMiner {
  Digest miner_id;
  Tick latency = 0;
  std::set<Digest> stored_listings;
};

struct MinerPool {
  std::vector<NewsMiner> miners;

  NewsMiner* find(const Digest& miner_id);
  const NewsMiner* find(const Digest& miner_id) const;
};

/// Default reward minted for the miner that records a listing.
inline const Coin kDefaultListingReward = 1;

struct PostResult {
  Digest winner;
  Block block;
};

/// Mining race: the lowest-latency miner (ties to the smallest id) records the
/// listing together with its minted RewardGranted. Every miner in the pool
/// keeps the listing for future queries. Throws Error(DuplicateContent) for a
/// listing already on chain and Error(NoMinersAvailable) for an empty pool.
PostResult post_listing(const PseudonymousId& seller, const NewsListing& listing, MinerPool& pool,
                        Chain& chain, const KeyRing& keys, Tick now,
                        const Coin& reward = kDefaultListingReward);

struct Query {
  Digest buyer;
  std::string text;
  std::optional<std::string> category;
  Coin coin = 0;
  Tick issued_at = 0;
  std::set<Digest> excluded_miners;
  /// Miner whose result was rejected; set by requery(). Its fee moves to the
  /// next server instead of charging the buyer again.
  std::optional<Digest> previous_server;
};

struct Teaser {
  Digest listing_id;
  std::string headline;
  std::string teaser;
  std::string category;
  Coin price = 0;
};

struct QueryResult {
  std::vector<Teaser> results;
  Digest serving_miner;
  Block block;
};

/// Case-insensitive substring match on headline or teaser, plus exact
/// category when the query names one.
bool matches(const Query& q, const Teaser& t);

/// Serves a query: among miners not excluded, the fastest miner holding a
/// match serves (or the fastest overall when nobody matches). Appends
/// QueryServed plus a RewardGranted of q.coin, funded by the buyer on a fresh
/// query and by the previous server on a re-query.
/// Throws Error(NoMinersAvailable) or Error(InvalidArgument) for a fresh
/// query without a positive coin.
QueryResult execute_query(const Query& q, const MinerPool& pool, Chain& chain, const KeyRing& keys,
                          Tick now);

enum class RequeryDecision { Requery, StayWithResult };

/// Re-query window: an unsatisfied buyer with t_c <= t_R may query again at
/// no extra charge, excluding the miner that served last.
RequeryDecision requery(Query& q, bool satisfied, Tick t_c, Tick t_R, const Digest& prior_miner);

/// Appends a Payment buyer -> seller of the listing's price.
/// Throws Error(UnknownListing) or Error(InsufficientFunds).
Transaction purchase(const PseudonymousId& buyer, const Digest& listing_id, const Coin& buyer_balance,
                     Chain& chain, Tick now);

/// Listing price as recorded on chain. Throws Error(UnknownListing).
Coin listing_price(const Chain& chain, const Digest& listing_id);

}  // namespace newstrad
