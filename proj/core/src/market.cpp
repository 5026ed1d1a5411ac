#include "newstrad/market.hpp"

#include <algorithm>
#include <cctype>

namespace newstrad {

NewsListing make_listing(const Digest& seller, std::string headline, std::string teaser,
                         std::string category, const Coin& price, ByteView content) {
  if (price < 0) {
    throw Error(Errc::InvalidArgument, "price must be non-negative");
  }
  std::string_view body(reinterpret_cast<const char*>(content.data()), content.size());
  if (body.find(teaser) == std::string_view::npos) {
    throw Error(Errc::InvalidArgument, "teaser must be taken from the content");
  }
  NewsListing l;
  l.listing_id = sha256(content);
  l.seller = seller;
  l.headline = std::move(headline);
  l.teaser = std::move(teaser);
  l.category = std::move(category);
  l.price = price;
  l.full_content_size = content.size();
  return l;
}

NewsMiner* MinerPool::find(const Digest& miner_id) {
  auto it = std::find_if(miners.begin(), miners.end(), [&](const auto& m) { return m.miner_id == miner_id; });
  return it == miners.end() ? nullptr : &*it;
}

const NewsMiner* MinerPool::find(const Digest& miner_id) const {
  auto it = std::find_if(miners.begin(), miners.end(), [&](const auto& m) { return m.miner_id == miner_id; });
  return it == miners.end() ? nullptr : &*it;
}

namespace {

bool faster(const NewsMiner& a, const NewsMiner& b) {
  if (a.latency != b.latency) return a.latency < b.latency;
  return a.miner_id < b.miner_id;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string attr_or_empty(const Transaction& tx, std::string_view key) {
  auto it = tx.payload.attrs.find(std::string(key));
  return it == tx.payload.attrs.end() ? std::string() : it->second;
}

Teaser teaser_of(const Transaction& listing_tx) {
  Teaser t;
  t.listing_id = *listing_tx.payload.listing;
  t.headline = attr_or_empty(listing_tx, attr::kHeadline);
  t.teaser = attr_or_empty(listing_tx, attr::kTeaser);
  t.category = attr_or_empty(listing_tx, attr::kCategory);
  t.price = parse_coin(attr_or_empty(listing_tx, attr::kPrice));
  return t;
}

}  // namespace

PostResult post_listing(const PseudonymousId& seller, const NewsListing& listing, MinerPool& pool,
                        Chain& chain, const KeyRing& keys, Tick now, const Coin& reward) {
  if (pool.miners.empty()) {
    throw Error(Errc::NoMinersAvailable, "no news miner to record the listing");
  }
  if (chain.has_listing(listing.listing_id)) {
    throw Error(Errc::DuplicateContent, "listing " + listing.listing_id.hex() + " already recorded");
  }
  const NewsMiner& winner = *std::min_element(pool.miners.begin(), pool.miners.end(), faster);
  Digest winner_id = winner.miner_id;

  Payload p;
  p.listing = listing.listing_id;
  p.attrs.emplace(attr::kHeadline, listing.headline);
  p.attrs.emplace(attr::kTeaser, listing.teaser);
  p.attrs.emplace(attr::kCategory, listing.category);
  p.attrs.emplace(attr::kPrice, format_coin(listing.price));
  p.attrs.emplace(attr::kContentSize, std::to_string(listing.full_content_size));
  auto posted = make_transaction(seller, TxKind::ListingPosted, std::nullopt, std::move(p), now);

  Payload r;
  r.listing = listing.listing_id;
  r.amount = reward;
  r.reference = posted.tx_id;
  auto rewarded = make_transaction(keys.at(winner_id), TxKind::RewardGranted, std::nullopt, std::move(r), now);

  const Block& block = chain.append_block({std::move(posted), std::move(rewarded)}, now);
  for (auto& m : pool.miners) {
    m.stored_listings.insert(listing.listing_id);
  }
  return PostResult{winner_id, block};
}

bool matches(const Query& q, const Teaser& t) {
  if (q.category && *q.category != t.category) return false;
  auto needle = lower(q.text);
  return lower(t.headline).find(needle) != std::string::npos ||
         lower(t.teaser).find(needle) != std::string::npos;
}

QueryResult execute_query(const Query& q, const MinerPool& pool, Chain& chain, const KeyRing& keys,
                          Tick now) {
  bool fresh = !q.previous_server.has_value();
  if (fresh && q.coin <= 0) {
    throw Error(Errc::InvalidArgument, "a fresh query must carry a positive coin");
  }

  const NewsMiner* best_any = nullptr;
  const NewsMiner* best_matching = nullptr;
  std::vector<Teaser> best_results;
  for (const auto& m : pool.miners) {
    if (q.excluded_miners.count(m.miner_id)) continue;
    if (!best_any || faster(m, *best_any)) best_any = &m;

    std::vector<Teaser> found;
    for (const auto& id : m.stored_listings) {
      const Transaction* tx = chain.find_listing(id);
      if (!tx) continue;
      Teaser t = teaser_of(*tx);
      if (matches(q, t)) found.push_back(std::move(t));
    }
    if (!found.empty() && (!best_matching || faster(m, *best_matching))) {
      best_matching = &m;
      best_results = std::move(found);
    }
  }
  if (!best_any) {
    throw Error(Errc::NoMinersAvailable, "every miner is excluded from this query");
  }
  const NewsMiner& server = best_matching ? *best_matching : *best_any;
  if (!best_matching) best_results.clear();

  const PseudonymousId& miner_key = keys.at(server.miner_id);
  Payload s;
  s.attrs.emplace(attr::kQuery, sha256(q.text).hex());
  s.attrs.emplace("results", std::to_string(best_results.size()));
  // Anchors the record to the current tip so repeated identical queries stay distinct.
  s.reference = chain.tip().block_hash;
  auto served = make_transaction(miner_key, TxKind::QueryServed, q.buyer, std::move(s), now);

  Payload r;
  r.amount = q.coin;
  r.reference = served.tx_id;
  Digest funder = fresh ? q.buyer : *q.previous_server;
  auto rewarded = make_transaction(miner_key, TxKind::RewardGranted, funder, std::move(r), now);

  QueryResult result;
  result.serving_miner = server.miner_id;
  result.results = std::move(best_results);
  result.block = chain.append_block({std::move(served), std::move(rewarded)}, now);
  return result;
}

RequeryDecision requery(Query& q, bool satisfied, Tick t_c, Tick t_R, const Digest& prior_miner) {
  if (!satisfied && t_c <= t_R) {
    q.excluded_miners.insert(prior_miner);
    q.previous_server = prior_miner;
    return RequeryDecision::Requery;
  }
  return RequeryDecision::StayWithResult;
}

Coin listing_price(const Chain& chain, const Digest& listing_id) {
  const Transaction* tx = chain.find_listing(listing_id);
  if (!tx) {
    throw Error(Errc::UnknownListing, listing_id.hex());
  }
  return parse_coin(attr_or_empty(*tx, attr::kPrice));
}

Transaction purchase(const PseudonymousId& buyer, const Digest& listing_id, const Coin& buyer_balance,
                     Chain& chain, Tick now) {
  const Transaction* listing = chain.find_listing(listing_id);
  if (!listing) {
    throw Error(Errc::UnknownListing, listing_id.hex());
  }
  Coin price = listing_price(chain, listing_id);
  if (buyer_balance < price) {
    throw Error(Errc::InsufficientFunds,
                "balance " + format_coin(buyer_balance) + " below price " + format_coin(price));
  }
  Payload p;
  p.listing = listing_id;
  p.amount = price;
  auto tx = make_transaction(buyer, TxKind::Payment, listing->actor, std::move(p), now);
  chain.append_block({tx}, now);
  return tx;
}

}  // namespace newstrad
