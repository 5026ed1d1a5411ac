#include "newstrad/simnet.hpp"

#include <algorithm>

#include "json.hpp"
#include "newstrad/ledger_json.hpp"

namespace newstrad {

std::string_view role_name(Role role) noexcept {
  switch (role) {
    case Role::Seller: return "Seller";
    case Role::Buyer: return "Buyer";
    case Role::NewsMiner: return "NewsMiner";
    case Role::FileMiner: return "FileMiner";
    case Role::BlockCop: return "BlockCop";
  }
  return "Unknown";
}

std::optional<Role> parse_role(std::string_view name) noexcept {
  for (auto r : {Role::Seller, Role::Buyer, Role::NewsMiner, Role::FileMiner, Role::BlockCop}) {
    if (role_name(r) == name) return r;
  }
  return std::nullopt;
}

std::string_view action_name(const Action& a) noexcept {
  struct Namer {
    std::string_view operator()(const action::PostListing&) const { return "post_listing"; }
    std::string_view operator()(const action::IssueQuery&) const { return "query"; }
    std::string_view operator()(const action::Requery&) const { return "requery"; }
    std::string_view operator()(const action::Purchase&) const { return "purchase"; }
    std::string_view operator()(const action::Deliver&) const { return "deliver"; }
    std::string_view operator()(const action::Retrieve&) const { return "retrieve"; }
    std::string_view operator()(const action::DropChunks&) const { return "drop_chunks"; }
    std::string_view operator()(const action::FileComplaint&) const { return "complaint"; }
  };
  return std::visit(Namer{}, a);
}

namespace {

std::array<std::uint8_t, kKeySeedSize> key_seed_for(std::uint64_t seed, std::string_view name) {
  CanonicalWriter w;
  w.field(std::string_view("newstrad/actor-key")).field(seed).field(name);
  return w.digest().bytes;
}

std::array<std::uint8_t, 32> draw_seed(std::mt19937_64& rng) {
  std::array<std::uint8_t, 32> out{};
  for (std::size_t i = 0; i < out.size(); i += 8) {
    std::uint64_t v = rng();
    for (std::size_t k = 0; k < 8; ++k) out[i + k] = static_cast<std::uint8_t>(v >> (8 * k));
  }
  return out;
}

}  // namespace

Simulation::Simulation(std::vector<ActorSpec> actors, SimConfig config)
    : config_(std::move(config)), rng_(config_.seed) {
  std::size_t cops = std::count_if(actors.begin(), actors.end(),
                                   [](const ActorSpec& a) { return a.role == Role::BlockCop; });
  if (cops > 1) {
    throw Error(Errc::BadScenario, "a simulation has exactly one block cop");
  }
  if (cops == 0) {
    ActorSpec cop;
    cop.name = "blockcop";
    cop.role = Role::BlockCop;
    cop.identity.text = to_bytes("blockcop/" + std::to_string(config_.seed));
    cop.identity.salt = sha256(std::string_view("blockcop"));
    actors.push_back(std::move(cop));
  }

  for (auto& spec : actors) {
    if (spec.name.empty()) throw Error(Errc::BadScenario, "actor without a name");
    if (by_name_.count(spec.name)) throw Error(Errc::BadScenario, "duplicate actor name " + spec.name);
    if (spec.balance < 0) throw Error(Errc::BadScenario, "negative initial balance for " + spec.name);
    if (spec.fee < 0) throw Error(Errc::BadScenario, "negative fee for " + spec.name);
    auto seed = key_seed_for(config_.seed, spec.name);
    PseudonymousId id = [&] {
      try {
        return generate_identity(spec.identity, seed);
      } catch (const Error& e) {
        throw Error(Errc::BadScenario, "identity for " + spec.name + ": " + e.what());
      }
    }();
    if (by_pseudonym_.count(id.pseudonym())) {
      throw Error(Errc::BadScenario, "two actors derive the same pseudonym: " + spec.name);
    }
    std::size_t idx = actors_.size();
    by_name_.emplace(spec.name, idx);
    by_pseudonym_.emplace(id.pseudonym(), idx);
    keys_.add(id);
    balances_[id.pseudonym()] = spec.balance;
    initial_total_ += spec.balance;
    if (spec.role == Role::NewsMiner) {
      news_miners_.miners.push_back({id.pseudonym(), spec.latency, {}});
    } else if (spec.role == Role::FileMiner) {
      chunk_store_.add_miner(id.pseudonym().hex(), spec.free_space);
    }
    actors_.push_back(Actor{std::move(spec), std::move(id)});
  }
  register_miners();
}

void Simulation::register_miners() {
  std::vector<Transaction> txs;
  for (const auto& a : actors_) {
    if (a.spec.role != Role::NewsMiner && a.spec.role != Role::FileMiner) continue;
    Payload p;
    p.attrs.emplace(attr::kRole, role_name(a.spec.role));
    if (a.spec.role == Role::NewsMiner) {
      p.attrs.emplace("latency", std::to_string(a.spec.latency));
    } else {
      p.attrs.emplace("fee", format_coin(a.spec.fee));
      p.attrs.emplace("free_space", std::to_string(a.spec.free_space));
    }
    txs.push_back(make_transaction(a.id, TxKind::MinerRegistered, std::nullopt, std::move(p), 0));
  }
  if (!txs.empty()) {
    chain_.append_block(std::move(txs), 0);
    absorb_new_blocks();
  }
}

const Simulation::Actor& Simulation::actor(std::string_view name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw Error(Errc::UnknownActor, std::string(name));
  return actors_[it->second];
}

const Simulation::Actor& Simulation::actor(std::string_view name, Role role) const {
  const Actor& a = actor(name);
  if (a.spec.role != role) {
    throw Error(Errc::InvalidArgument,
                std::string(name) + " is a " + std::string(role_name(a.spec.role)) + ", expected " +
                    std::string(role_name(role)));
  }
  return a;
}

const PseudonymousId& Simulation::identity_of(std::string_view name) const { return actor(name).id; }

const Simulation::ListingState& Simulation::listing(const std::string& label) const {
  auto it = listings_.find(label);
  if (it == listings_.end()) throw Error(Errc::UnknownListing, "no listing labelled " + label);
  return it->second;
}

Coin Simulation::balance_of(const Digest& pseudonym) const {
  auto it = balances_.find(pseudonym);
  if (it == balances_.end()) throw Error(Errc::UnknownActor, pseudonym.hex());
  return it->second;
}

Coin Simulation::balance_of(std::string_view name) const { return balance_of(actor(name).id.pseudonym()); }

std::map<Digest, Coin> Simulation::ledger_balances() const {
  std::map<Digest, Coin> out;
  for (const auto& a : actors_) out[a.id.pseudonym()] = a.spec.balance;
  for (const auto& block : chain_.blocks()) {
    for (const auto& tx : block.transactions) {
      for (const auto& [party, delta] : coin_flow(tx).deltas) out[party] += delta;
    }
  }
  return out;
}

std::uint64_t Simulation::schedule(Tick at, Action action) {
  if (at < now_) {
    throw Error(Errc::PastEvent, "event at tick " + std::to_string(at) + " is before current tick " +
                                     std::to_string(now_));
  }
  std::uint64_t seq = next_seq_++;
  queue_.push(Event{at, seq, std::move(action)});
  return seq;
}

void Simulation::absorb_new_blocks() {
  const auto& blocks = chain_.blocks();
  for (; absorbed_blocks_ < blocks.size(); ++absorbed_blocks_) {
    for (const auto& tx : blocks[absorbed_blocks_].transactions) {
      auto flow = coin_flow(tx);
      for (const auto& [party, delta] : flow.deltas) {
        auto it = balances_.find(party);
        if (it == balances_.end()) {
          invariant_failures_.push_back("coin moved to unknown pseudonym " + party.hex());
          continue;
        }
        it->second += delta;
      }
      minted_ += flow.minted;
      burned_ += flow.burned;
    }
  }
}

void Simulation::check_conservation() {
  Coin total = 0;
  for (const auto& [_, b] : balances_) total += b;
  if (total != initial_total_ + minted_ - burned_) {
    invariant_failures_.push_back("double-entry conservation violated at tick " + std::to_string(now_));
  }
}

void Simulation::execute(const Event& e) {
  now_ = e.at;
  chunk_store_.collect_expired(now_);
  try {
    std::visit([this](const auto& a) { apply(a); }, e.action);
  } catch (const Error& err) {
    errors_.push_back({e.at, e.seq, std::string(action_name(e.action)), err.what()});
  }
  absorb_new_blocks();
  check_conservation();
}

SimulationReport Simulation::run() {
  Tick until = now_;
  auto copy = queue_;
  while (!copy.empty()) {
    until = std::max(until, copy.top().at);
    copy.pop();
  }
  return run(until);
}

SimulationReport Simulation::run(Tick until) {
  while (!queue_.empty() && queue_.top().at <= until) {
    Event e = queue_.top();
    queue_.pop();
    execute(e);
  }
  now_ = std::max(now_, until);

  SimulationReport report;
  report.seed = config_.seed;
  report.config = config_;
  report.final_tick = now_;
  report.chain = chain_;
  report.verification = verify_chain(chain_);
  for (const auto& a : actors_) {
    report.balances.push_back(
        {a.spec.name, a.id.pseudonym(), a.spec.role, a.spec.balance, balances_.at(a.id.pseudonym())});
  }
  report.queries = query_log_;
  report.deliveries = delivery_log_;
  report.verdicts = verdict_log_;
  report.fetch_failures = fetch_failures_;
  report.errors = errors_;
  report.minted = minted_;
  report.burned = burned_;
  report.invariant_failures = invariant_failures_;
  check_final(report);
  return report;
}

void Simulation::check_final(SimulationReport& report) const {
  auto& failures = report.invariant_failures;
  if (!report.verification.valid) {
    failures.push_back("ledger does not verify");
  }
  if (ledger_balances() != balances_) {
    failures.push_back("balances recomputed from the ledger disagree with the simulator");
  }
  for (const auto& d : report.deliveries) {
    if (d.plan.total_cost > d.budget) {
      failures.push_back("allocation for " + d.listing + " exceeds its budget");
    }
    std::uint64_t covered = 0;
    for (const auto& e : d.plan.entries) covered += e.allotted;
    if (covered != d.ciphertext_size) {
      failures.push_back("allocation for " + d.listing + " does not cover the ciphertext");
    }
    if (d.delivered_digest && *d.delivered_digest != d.original_digest) {
      failures.push_back("delivered file for " + d.listing + " differs from the original");
    }
  }
  std::string dump = dump_ledger(chain_);
  for (const auto& a : actors_) {
    std::string text(a.spec.identity.text.begin(), a.spec.identity.text.end());
    if (!text.empty() && dump.find(text) != std::string::npos) {
      failures.push_back("ledger exposes the identity text of " + a.spec.name);
    }
    if (dump.find(to_hex(a.id.private_key())) != std::string::npos) {
      failures.push_back("ledger exposes a private key");
    }
  }
}

void Simulation::apply(const action::PostListing& a) {
  const Actor& seller = actor(a.seller, Role::Seller);
  if (listings_.count(a.listing)) {
    throw Error(Errc::DuplicateContent, "listing label " + a.listing + " already used");
  }
  Bytes content;
  if (a.content) {
    content = to_bytes(*a.content);
  } else {
    content = to_bytes(a.teaser);
    while (content.size() < a.content_size) content.push_back(static_cast<std::uint8_t>(rng_() >> 56));
  }
  auto listing = make_listing(seller.id.pseudonym(), a.headline, a.teaser, a.category, a.price, content);
  post_listing(seller.id, listing, news_miners_, chain_, keys_, now_, config_.listing_reward);
  listings_.emplace(a.listing, ListingState{std::move(listing), std::move(content), a.seller});
}

void Simulation::apply(const action::IssueQuery& a) {
  const Actor& buyer = actor(a.buyer, Role::Buyer);
  if (queries_.count(a.query)) {
    throw Error(Errc::InvalidArgument, "query label " + a.query + " already used");
  }
  if (balance_of(buyer.id.pseudonym()) < a.coin) {
    throw Error(Errc::InsufficientFunds, "buyer cannot cover the query fee");
  }
  Query q;
  q.buyer = buyer.id.pseudonym();
  q.text = a.text;
  q.category = a.category;
  q.coin = a.coin;
  q.issued_at = now_;
  auto result = execute_query(q, news_miners_, chain_, keys_, now_);
  query_log_.push_back({now_, a.query, a.buyer, false, std::nullopt, result.serving_miner,
                        result.results.size(), a.coin});
  queries_.emplace(a.query, QueryState{std::move(q), a.buyer, result.serving_miner});
}

void Simulation::apply(const action::Requery& a) {
  auto it = queries_.find(a.query);
  if (it == queries_.end()) throw Error(Errc::InvalidArgument, "no query labelled " + a.query);
  QueryState& state = it->second;
  Tick elapsed = now_ - state.query.issued_at;
  auto decision = requery(state.query, a.satisfied, elapsed, config_.t_R, state.last_server);
  QueryRecord rec{now_, a.query, state.buyer, true, std::nullopt, std::nullopt, 0, 0};
  if (decision == RequeryDecision::StayWithResult) {
    rec.decision = "StayWithResult";
    query_log_.push_back(std::move(rec));
    return;
  }
  rec.decision = "Requery";
  auto result = execute_query(state.query, news_miners_, chain_, keys_, now_);
  state.last_server = result.serving_miner;
  rec.serving_miner = result.serving_miner;
  rec.results = result.results.size();
  query_log_.push_back(std::move(rec));
}

void Simulation::apply(const action::Purchase& a) {
  const Actor& buyer = actor(a.buyer, Role::Buyer);
  const ListingState& l = listing(a.listing);
  purchase(buyer.id, l.listing.listing_id, balance_of(buyer.id.pseudonym()), chain_, now_);
}

void Simulation::apply(const action::Deliver& a) {
  const Actor& buyer = actor(a.buyer, Role::Buyer);
  const ListingState& l = listing(a.listing);
  const Actor& seller = actor(l.seller, Role::Seller);
  auto key = std::make_pair(a.listing, a.buyer);
  if (deliveries_.count(key)) {
    throw Error(Errc::InvalidArgument, "listing already delivered to this buyer");
  }

  auto eph = draw_seed(rng_);
  Bytes ciphertext = encrypt_for(buyer.id.public_key(), l.content, eph);

  std::vector<FileMinerProfile> registry;
  for (const auto& act : actors_) {
    if (act.spec.role != Role::FileMiner) continue;
    auto id = act.id.pseudonym().hex();
    registry.push_back({id, act.spec.fee, chunk_store_.free_space(id)});
  }
  AllocationRequest request{ciphertext.size(), a.budget, a.threshold};
  AllocationPlan plan = allocate(registry, request);
  if (balance_of(seller.id.pseudonym()) < plan.total_cost) {
    throw Error(Errc::InsufficientFunds, "seller cannot pay the storage fee");
  }

  auto chunks = chop(ciphertext, plan.entries);
  auto addresses = store_chunks(chunks, chunk_store_);

  std::vector<Transaction> fees;
  for (std::size_t i = 0; i < addresses.size(); ++i) {
    Payload p;
    p.listing = l.listing.listing_id;
    p.amount = Coin(plan.entries[i].allotted) * plan.entries[i].fee;
    p.attrs.emplace(attr::kChunk, addresses[i].chunk_digest.hex());
    fees.push_back(make_transaction(seller.id, TxKind::Payment, Digest::from_hex(addresses[i].miner_id),
                                    std::move(p), now_));
  }
  chain_.append_block(std::move(fees), now_);

  auto contract = issue_contract(seller.id, buyer.id.public_key(), addresses, buyer.id.pseudonym(),
                                 l.listing.listing_id, chain_, now_);

  DeliveryRecord rec;
  rec.delivered_at = now_;
  rec.listing = a.listing;
  rec.buyer = a.buyer;
  rec.original_digest = sha256(l.content);
  rec.ciphertext_size = ciphertext.size();
  rec.budget = a.budget;
  rec.plan = plan;
  rec.contract_digest = contract.contract_digest;
  rec.contract_json = contract_to_json(contract);
  delivery_log_.push_back(std::move(rec));
  deliveries_.emplace(key, DeliveryState{std::move(contract), seller.id.pseudonym(), delivery_log_.size() - 1});
}

void Simulation::apply(const action::Retrieve& a) {
  const Actor& buyer = actor(a.buyer, Role::Buyer);
  const ListingState& l = listing(a.listing);
  auto it = deliveries_.find({a.listing, a.buyer});
  if (it == deliveries_.end()) {
    throw Error(Errc::InvalidArgument, "no delivery contract for this listing and buyer");
  }
  const DeliveryState& state = it->second;
  Bytes ciphertext;
  try {
    ciphertext = retrieve_and_join(state.contract, chunk_store_, now_, config_.t_D);
  } catch (const ChunkError& e) {
    fetch_failures_.push_back({e.address().miner_id, e.address().chunk_digest, now_, e.code()});
    throw;
  }
  Bytes plaintext = decrypt_and_record(state.contract, ciphertext, buyer.id, state.seller,
                                       l.listing.listing_id, chain_, now_);
  auto& rec = delivery_log_[state.record];
  if (!rec.retrieved_at) {
    rec.retrieved_at = now_;
    rec.delivered_digest = sha256(plaintext);
  }
}

void Simulation::apply(const action::DropChunks& a) {
  const Actor& miner = actor(a.miner, Role::FileMiner);
  auto it = deliveries_.find({a.listing, a.buyer});
  if (it == deliveries_.end()) {
    throw Error(Errc::InvalidArgument, "no delivery contract for this listing and buyer");
  }
  auto hex = miner.id.pseudonym().hex();
  for (const auto& addr : it->second.contract.chunk_addresses) {
    if (addr.miner_id == hex) chunk_store_.erase(addr);
  }
}

void Simulation::apply(const action::FileComplaint& a) {
  const Actor& complainant = actor(a.complainant);
  const Actor& accused = actor(a.accused);
  const ListingState& l = listing(a.listing);
  const Actor* cop = nullptr;
  for (const auto& act : actors_) {
    if (act.spec.role == Role::BlockCop) cop = &act;
  }

  VerdictRecord rec{now_, a.complainant, a.accused, a.listing, a.kind, std::nullopt, std::nullopt};
  Complaint c{complainant.id.pseudonym(), accused.id.pseudonym(), l.listing.listing_id, now_, a.kind};
  try {
    if (a.kind == ComplaintKind::SellerNoDelivery) {
      rec.verdict = audit_sale(cop->id, chain_, c, now_, config_.audit);
    } else {
      rec.verdict = audit_file_miner(cop->id, chain_, c, now_, fetch_failures_, config_.audit);
    }
  } catch (const Error& e) {
    rec.error = std::string(errc_name(e.code()));
  }
  verdict_log_.push_back(std::move(rec));
}

namespace {

using nlohmann::json;

json hexes(const std::vector<Digest>& ds) {
  json out = json::array();
  for (const auto& d : ds) out.push_back(d.hex());
  return out;
}

json verdict_json(const Verdict& v) {
  json j = json::object();
  j["outcome"] = std::string(verdict_outcome_name(v.outcome));
  j["deadline"] = v.deadline ? json(*v.deadline) : json(nullptr);
  j["penalty"] = format_coin(v.penalty);
  j["refund"] = format_coin(v.refund);
  j["evidence"] = hexes(v.evidence);
  j["appended"] = hexes(v.appended);
  return j;
}

}  // namespace

std::string report_to_json(const SimulationReport& r) {
  json j = json::object();
  j["seed"] = r.seed;
  j["config"] = {{"t_r", r.config.t_R},
                 {"t_d", r.config.t_D},
                 {"deadline_window", r.config.audit.deadline_window},
                 {"penalty_multiplier", format_coin(r.config.audit.penalty_multiplier)},
                 {"listing_reward", format_coin(r.config.listing_reward)}};
  j["final_tick"] = r.final_tick;

  json chain = json::array();
  for (const auto& b : r.chain.blocks()) chain.push_back(json::parse(block_to_json_line(b)));
  j["chain"] = std::move(chain);
  j["verification"] = {{"valid", r.verification.valid},
                       {"first_bad_index", r.verification.first_bad_index
                                               ? json(*r.verification.first_bad_index)
                                               : json(nullptr)}};

  json balances = json::array();
  for (const auto& b : r.balances) {
    balances.push_back({{"name", b.name},
                        {"pseudonym", b.pseudonym.hex()},
                        {"role", std::string(role_name(b.role))},
                        {"initial", format_coin(b.initial)},
                        {"balance", format_coin(b.balance)},
                        {"negative", b.balance < 0}});
  }
  j["balances"] = std::move(balances);

  json queries = json::array();
  for (const auto& q : r.queries) {
    queries.push_back({{"at", q.at},
                       {"query", q.query},
                       {"buyer", q.buyer},
                       {"requery", q.requery},
                       {"decision", q.decision ? json(*q.decision) : json(nullptr)},
                       {"serving_miner", q.serving_miner ? json(q.serving_miner->hex()) : json(nullptr)},
                       {"results", q.results},
                       {"fee_charged", format_coin(q.fee_charged)}});
  }
  j["queries"] = std::move(queries);

  json deliveries = json::array();
  for (const auto& d : r.deliveries) {
    json plan = json::array();
    for (const auto& e : d.plan.entries) {
      plan.push_back({{"miner_id", e.miner_id}, {"allotted", e.allotted}, {"fee", format_coin(e.fee)}});
    }
    deliveries.push_back({{"delivered_at", d.delivered_at},
                          {"listing", d.listing},
                          {"buyer", d.buyer},
                          {"original_digest", d.original_digest.hex()},
                          {"ciphertext_size", d.ciphertext_size},
                          {"budget", format_coin(d.budget)},
                          {"plan", std::move(plan)},
                          {"total_cost", format_coin(d.plan.total_cost)},
                          {"contract", json::parse(d.contract_json)},
                          {"retrieved_at", d.retrieved_at ? json(*d.retrieved_at) : json(nullptr)},
                          {"delivered_digest", d.delivered_digest ? json(d.delivered_digest->hex()) : json(nullptr)}});
  }
  j["deliveries"] = std::move(deliveries);

  json verdicts = json::array();
  for (const auto& v : r.verdicts) {
    verdicts.push_back({{"at", v.at},
                        {"complaint",
                         {{"complainant", v.complainant},
                          {"accused", v.accused},
                          {"listing", v.listing},
                          {"kind", std::string(complaint_kind_name(v.kind))}}},
                        {"verdict", v.verdict ? verdict_json(*v.verdict) : json(nullptr)},
                        {"error", v.error ? json(*v.error) : json(nullptr)}});
  }
  j["verdicts"] = std::move(verdicts);

  json failures = json::array();
  for (const auto& f : r.fetch_failures) {
    failures.push_back({{"miner_id", f.miner_id},
                        {"chunk_digest", f.chunk_digest.hex()},
                        {"at", f.at},
                        {"error", std::string(errc_name(f.error))}});
  }
  j["fetch_failures"] = std::move(failures);

  json errors = json::array();
  for (const auto& e : r.errors) {
    errors.push_back({{"at", e.at}, {"seq", e.seq}, {"op", e.op}, {"error", e.error}});
  }
  j["errors"] = std::move(errors);
  j["minted"] = format_coin(r.minted);
  j["burned"] = format_coin(r.burned);
  j["invariants"] = {{"ok", r.invariants_hold()}, {"failures", r.invariant_failures}};
  return j.dump(2) + "\n";
}

}  // namespace newstrad
