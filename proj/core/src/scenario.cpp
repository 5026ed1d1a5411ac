#include "newstrad/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "json_util.hpp"

namespace newstrad {

using nlohmann::json;

void ConfigOverrides::apply_to(SimConfig& config) const {
  if (seed) config.seed = *seed;
  if (t_R) config.t_R = *t_R;
  if (t_D) config.t_D = *t_D;
  if (deadline_window) config.audit.deadline_window = *deadline_window;
  if (penalty_multiplier) config.audit.penalty_multiplier = *penalty_multiplier;
  if (listing_reward) config.listing_reward = *listing_reward;
}

namespace {

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

std::string opt_string(const json& j, const char* key, std::string fallback = {}) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  if (!it->is_string()) throw Error(Errc::BadFormat, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::uint64_t opt_u64(const json& j, const char* key, std::uint64_t fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return detail::u64(j, key);
}

Coin opt_coin(const json& j, const char* key, Coin fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return detail::coin_value(j.at(key), key);
}

SignatureInputs parse_identity(const json& actor, const std::string& name) {
  SignatureInputs in;
  auto it = actor.find("identity");
  if (it == actor.end()) {
    in.text = to_bytes("auto/" + name);
    in.salt = sha256(std::string_view("newstrad/default-salt"));
    return in;
  }
  const json& id = *it;
  in.timestamp = opt_u64(id, "t", 0);
  in.nonce = opt_u64(id, "nonce", 0);
  in.text = to_bytes(detail::string(id, "text"));
  auto salt = opt_string(id, "salt", "newstrad/default-salt");
  if (salt.size() == 64 && salt.find_first_not_of("0123456789abcdef") == std::string::npos) {
    in.salt = Digest::from_hex(salt);
  } else {
    in.salt = sha256(salt);
  }
  return in;
}

ActorSpec parse_actor(const json& j) {
  ActorSpec a;
  a.name = detail::string(j, "name");
  auto role = parse_role(detail::string(j, "role"));
  if (!role) throw Error(Errc::BadFormat, "unknown role for actor " + a.name);
  a.role = *role;
  a.balance = opt_coin(j, "balance", 0);
  a.identity = parse_identity(j, a.name);
  return a;
}

ActorSpec parse_miner(const json& j) {
  ActorSpec a;
  a.name = detail::string(j, "name");
  auto kind = detail::string(j, "kind");
  a.balance = opt_coin(j, "balance", 0);
  a.identity = parse_identity(j, a.name);
  if (kind == "news") {
    a.role = Role::NewsMiner;
    a.latency = detail::u64(j, "latency");
  } else if (kind == "file") {
    a.role = Role::FileMiner;
    a.fee = detail::coin_value(detail::require(j, "fee"), "fee");
    a.free_space = detail::u64(j, "free_space");
  } else {
    throw Error(Errc::BadFormat, "miner kind must be 'news' or 'file'");
  }
  return a;
}

Action parse_action(const std::string& op, const json& args) {
  if (op == "post_listing") {
    action::PostListing a;
    a.seller = detail::string(args, "seller");
    a.listing = detail::string(args, "listing");
    a.headline = detail::string(args, "headline");
    a.teaser = detail::string(args, "teaser");
    a.category = opt_string(args, "category");
    a.price = detail::coin_value(detail::require(args, "price"), "price");
    if (args.contains("content")) a.content = detail::string(args, "content");
    a.content_size = opt_u64(args, "content_size", 0);
    return a;
  }
  if (op == "query") {
    action::IssueQuery a;
    a.buyer = detail::string(args, "buyer");
    a.query = detail::string(args, "query");
    a.text = detail::string(args, "text");
    if (args.contains("category") && !args.at("category").is_null()) a.category = detail::string(args, "category");
    a.coin = detail::coin_value(detail::require(args, "coin"), "coin");
    return a;
  }
  if (op == "requery") {
    action::Requery a;
    a.query = detail::string(args, "query");
    const auto& s = detail::require(args, "satisfied");
    if (!s.is_boolean()) throw Error(Errc::BadFormat, "'satisfied' must be a boolean");
    a.satisfied = s.get<bool>();
    return a;
  }
  if (op == "purchase") {
    return action::Purchase{detail::string(args, "buyer"), detail::string(args, "listing")};
  }
  if (op == "deliver") {
    action::Deliver a;
    a.listing = detail::string(args, "listing");
    a.buyer = detail::string(args, "buyer");
    a.budget = detail::coin_value(detail::require(args, "budget"), "budget");
    a.threshold = detail::u64(args, "threshold");
    return a;
  }
  if (op == "retrieve") {
    return action::Retrieve{detail::string(args, "listing"), detail::string(args, "buyer")};
  }
  if (op == "drop_chunks") {
    return action::DropChunks{detail::string(args, "miner"), detail::string(args, "listing"),
                              detail::string(args, "buyer")};
  }
  if (op == "complaint") {
    action::FileComplaint a;
    a.complainant = detail::string(args, "complainant");
    a.accused = detail::string(args, "accused");
    a.listing = detail::string(args, "listing");
    auto kind = parse_complaint_kind(detail::string(args, "kind"));
    if (!kind) throw Error(Errc::BadFormat, "unknown complaint kind");
    a.kind = *kind;
    return a;
  }
  throw Error(Errc::BadFormat, "unknown op '" + op + "'");
}

const json& array_or_empty(const json& j, const char* key) {
  static const json kEmpty = json::array();
  auto it = j.find(key);
  if (it == j.end()) return kEmpty;
  if (!it->is_array()) throw Error(Errc::BadFormat, std::string("'") + key + "' must be an array");
  return *it;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::BadScenario, "malformed JSON at " + line_col(text, e.byte ? e.byte - 1 : 0) + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(Errc::BadScenario, "scenario must be a JSON object");

  Scenario s;
  try {
    s.name = opt_string(doc, "name", "scenario");
    if (doc.contains("seed")) s.config.seed = detail::u64(doc, "seed");
    if (auto it = doc.find("config"); it != doc.end()) {
      const json& c = *it;
      if (c.contains("seed")) s.config.seed = detail::u64(c, "seed");
      if (c.contains("t_r")) s.config.t_R = detail::u64(c, "t_r");
      if (c.contains("t_d")) s.config.t_D = detail::u64(c, "t_d");
      if (c.contains("deadline_window")) s.config.deadline_window = detail::u64(c, "deadline_window");
      if (c.contains("penalty_multiplier")) {
        s.config.penalty_multiplier = detail::coin_value(c.at("penalty_multiplier"), "penalty_multiplier");
      }
      if (c.contains("listing_reward")) {
        s.config.listing_reward = detail::coin_value(c.at("listing_reward"), "listing_reward");
      }
    }
    const json& actors = array_or_empty(doc, "actors");
    for (std::size_t i = 0; i < actors.size(); ++i) {
      try {
        s.actors.push_back(parse_actor(actors[i]));
      } catch (const Error& e) {
        throw Error(Errc::BadFormat, "actors[" + std::to_string(i) + "]: " + e.what());
      }
    }
    const json& miners = array_or_empty(doc, "miners");
    for (std::size_t i = 0; i < miners.size(); ++i) {
      try {
        s.actors.push_back(parse_miner(miners[i]));
      } catch (const Error& e) {
        throw Error(Errc::BadFormat, "miners[" + std::to_string(i) + "]: " + e.what());
      }
    }
    const json& events = array_or_empty(doc, "events");
    for (std::size_t i = 0; i < events.size(); ++i) {
      try {
        const json& e = events[i];
        Tick at = detail::u64(e, "at");
        auto op = detail::string(e, "op");
        const json& args = detail::require(e, "args");
        s.events.push_back({at, parse_action(op, args)});
      } catch (const Error& e) {
        throw Error(Errc::BadFormat, "events[" + std::to_string(i) + "]: " + e.what());
      }
    }
  } catch (const Error& e) {
    throw Error(Errc::BadScenario, e.what());
  } catch (const json::exception& e) {
    throw Error(Errc::BadScenario, e.what());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::BadScenario, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

Simulation make_simulation(const Scenario& scenario, const SimConfig& config) {
  Simulation sim(scenario.actors, config);
  std::vector<const ScheduledAction*> ordered;
  for (const auto& e : scenario.events) ordered.push_back(&e);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto* a, const auto* b) { return a->at < b->at; });
  for (const auto* e : ordered) sim.schedule(e->at, e->action);
  return sim;
}

}  // namespace newstrad
