#include "newstrad/ledger_json.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "json_util.hpp"

namespace newstrad {

using nlohmann::json;

namespace {

json payload_to_json(const Payload& p) {
  json j = json::object();
  j["listing"] = p.listing ? json(p.listing->hex()) : json(nullptr);
  j["amount"] = p.amount ? json(format_coin(*p.amount)) : json(nullptr);
  j["contract"] = p.contract ? json(p.contract->hex()) : json(nullptr);
  j["reference"] = p.reference ? json(p.reference->hex()) : json(nullptr);
  j["attrs"] = p.attrs;
  return j;
}

Payload payload_from_json(const json& j) {
  Payload p;
  p.listing = detail::optional_digest(j, "listing");
  if (const auto& a = detail::require(j, "amount"); !a.is_null()) {
    p.amount = detail::canonical_coin(a);
  }
  p.contract = detail::optional_digest(j, "contract");
  p.reference = detail::optional_digest(j, "reference");
  const auto& attrs = detail::require(j, "attrs");
  if (!attrs.is_object()) throw Error(Errc::BadFormat, "attrs must be an object");
  for (const auto& [k, v] : attrs.items()) {
    if (!v.is_string()) throw Error(Errc::BadFormat, "attribute values must be strings");
    p.attrs.emplace(k, v.get<std::string>());
  }
  return p;
}

json tx_to_json(const Transaction& tx) {
  json j = json::object();
  j["tx_id"] = tx.tx_id.hex();
  j["kind"] = std::string(tx_kind_name(tx.kind));
  j["actor"] = tx.actor.hex();
  j["actor_key"] = to_hex(tx.actor_key);
  j["counterparty"] = tx.counterparty ? json(tx.counterparty->hex()) : json(nullptr);
  j["payload"] = payload_to_json(tx.payload);
  j["timestamp"] = tx.timestamp;
  j["signature"] = to_hex(tx.signature);
  return j;
}

Transaction tx_from_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::BadFormat, "transaction must be an object");
  Transaction tx;
  tx.tx_id = detail::digest(j, "tx_id");
  auto kind = parse_tx_kind(detail::string(j, "kind"));
  if (!kind) throw Error(Errc::BadFormat, "unknown transaction kind");
  tx.kind = *kind;
  tx.actor = detail::digest(j, "actor");
  tx.actor_key = from_hex(detail::string(j, "actor_key"));
  tx.counterparty = detail::optional_digest(j, "counterparty");
  tx.payload = payload_from_json(detail::require(j, "payload"));
  tx.timestamp = detail::u64(j, "timestamp");
  tx.signature = from_hex(detail::string(j, "signature"));
  return tx;
}

}  // namespace

std::string transaction_to_json(const Transaction& tx) { return tx_to_json(tx).dump(); }

std::string block_to_json_line(const Block& block) {
  json j = json::object();
  j["index"] = block.index;
  j["prev_hash"] = block.prev_hash.hex();
  j["timestamp"] = block.timestamp;
  json txs = json::array();
  for (const auto& tx : block.transactions) txs.push_back(tx_to_json(tx));
  j["transactions"] = std::move(txs);
  j["block_hash"] = block.block_hash.hex();
  return j.dump();
}

Block block_from_json_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(Errc::BadFormat, e.what());
  }
  if (!j.is_object()) throw Error(Errc::BadFormat, "block must be a JSON object");
  Block block;
  block.index = detail::u64(j, "index");
  block.prev_hash = detail::digest(j, "prev_hash");
  block.timestamp = detail::u64(j, "timestamp");
  const auto& txs = detail::require(j, "transactions");
  if (!txs.is_array()) throw Error(Errc::BadFormat, "transactions must be an array");
  for (const auto& t : txs) block.transactions.push_back(tx_from_json(t));
  block.block_hash = detail::digest(j, "block_hash");
  return block;
}

void write_ledger(std::ostream& out, const Chain& chain) {
  for (const auto& block : chain.blocks()) {
    out << block_to_json_line(block) << '\n';
  }
}

std::string dump_ledger(const Chain& chain) {
  std::ostringstream out;
  write_ledger(out, chain);
  return out.str();
}

Chain read_ledger(std::istream& in) {
  std::vector<Block> blocks;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      blocks.push_back(block_from_json_line(line));
    } catch (const Error& e) {
      throw Error(Errc::BadFormat, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (blocks.empty()) {
    throw Error(Errc::BadFormat, "ledger dump contains no blocks");
  }
  return Chain::from_blocks(std::move(blocks));
}

}  // namespace newstrad
