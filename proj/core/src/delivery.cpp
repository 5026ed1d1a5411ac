#include "newstrad/delivery.hpp"

#include <sodium.h>

#include "json.hpp"
#include "json_util.hpp"

namespace newstrad {

static_assert(kEnvelopeOverhead == crypto_box_SEALBYTES);
static_assert(kEphemeralSeedSize == crypto_box_SEEDBYTES);

namespace {

std::array<std::uint8_t, crypto_box_PUBLICKEYBYTES> to_x25519_public(ByteView ed25519_pk) {
  std::array<std::uint8_t, crypto_box_PUBLICKEYBYTES> out{};
  if (ed25519_pk.size() != crypto_sign_PUBLICKEYBYTES ||
      crypto_sign_ed25519_pk_to_curve25519(out.data(), ed25519_pk.data()) != 0) {
    throw Error(Errc::MalformedKey, "recipient key is not a valid Ed25519 public key");
  }
  return out;
}

}  // namespace

Bytes encrypt_for(ByteView recipient_public_key, ByteView plaintext) {
  ensure_crypto_initialized();
  std::array<std::uint8_t, kEphemeralSeedSize> seed{};
  randombytes_buf(seed.data(), seed.size());
  auto out = encrypt_for(recipient_public_key, plaintext, seed);
  sodium_memzero(seed.data(), seed.size());
  return out;
}

Bytes encrypt_for(ByteView recipient_public_key, ByteView plaintext,
                  std::span<const std::uint8_t, kEphemeralSeedSize> ephemeral_seed) {
  ensure_crypto_initialized();
  if (plaintext.empty()) {
    throw Error(Errc::InvalidArgument, "cannot encrypt an empty file");
  }
  auto recipient = to_x25519_public(recipient_public_key);

  std::array<std::uint8_t, crypto_box_PUBLICKEYBYTES> eph_pk{};
  std::array<std::uint8_t, crypto_box_SECRETKEYBYTES> eph_sk{};
  crypto_box_seed_keypair(eph_pk.data(), eph_sk.data(), ephemeral_seed.data());

  // Sealed-box nonce: H(ephemeral_pk || recipient_pk) truncated to 24 bytes.
  std::array<std::uint8_t, crypto_box_NONCEBYTES> nonce{};
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, nonce.size());
  crypto_generichash_update(&st, eph_pk.data(), eph_pk.size());
  crypto_generichash_update(&st, recipient.data(), recipient.size());
  crypto_generichash_final(&st, nonce.data(), nonce.size());

  Bytes out(plaintext.size() + kEnvelopeOverhead);
  std::copy(eph_pk.begin(), eph_pk.end(), out.begin());
  int rc = crypto_box_easy(out.data() + eph_pk.size(), plaintext.data(), plaintext.size(),
                           nonce.data(), recipient.data(), eph_sk.data());
  sodium_memzero(eph_sk.data(), eph_sk.size());
  if (rc != 0) {
    throw Error(Errc::MalformedKey, "key agreement with recipient key failed");
  }
  return out;
}

Bytes decrypt(ByteView ciphertext, ByteView recipient_private_key) {
  ensure_crypto_initialized();
  if (recipient_private_key.size() != crypto_sign_SECRETKEYBYTES) {
    throw Error(Errc::MalformedKey, "private key must be 64 bytes");
  }
  if (ciphertext.size() <= kEnvelopeOverhead) {
    throw Error(Errc::DecryptionFailure, "ciphertext too short");
  }
  std::array<std::uint8_t, crypto_box_SECRETKEYBYTES> sk{};
  std::array<std::uint8_t, crypto_box_PUBLICKEYBYTES> pk{};
  crypto_sign_ed25519_sk_to_curve25519(sk.data(), recipient_private_key.data());
  crypto_scalarmult_base(pk.data(), sk.data());

  Bytes out(ciphertext.size() - kEnvelopeOverhead);
  int rc = crypto_box_seal_open(out.data(), ciphertext.data(), ciphertext.size(), pk.data(), sk.data());
  sodium_memzero(sk.data(), sk.size());
  if (rc != 0) {
    throw Error(Errc::DecryptionFailure, "envelope did not authenticate");
  }
  return out;
}

std::vector<Chunk> chop(ByteView ciphertext, std::span<const Allotment> plan) {
  std::uint64_t total = 0;
  for (const auto& e : plan) total += e.allotted;
  if (total != ciphertext.size()) {
    throw Error(Errc::SizeMismatch, "plan covers " + std::to_string(total) + " bytes, file has " +
                                        std::to_string(ciphertext.size()));
  }
  std::vector<Chunk> chunks;
  chunks.reserve(plan.size());
  std::size_t offset = 0;
  for (const auto& e : plan) {
    auto first = ciphertext.begin() + static_cast<std::ptrdiff_t>(offset);
    chunks.push_back({e.miner_id, Bytes(first, first + static_cast<std::ptrdiff_t>(e.allotted))});
    offset += e.allotted;
  }
  return chunks;
}

Bytes join(std::span<const Bytes> chunks) {
  Bytes out;
  for (const auto& c : chunks) out.insert(out.end(), c.begin(), c.end());
  return out;
}

ChunkError::ChunkError(Errc code, ChunkAddress address)
    : Error(code, "chunk " + address.chunk_digest.hex() + " at miner " + address.miner_id),
      address_(std::move(address)) {}

ChunkStore::Slot& ChunkStore::slot(const MinerId& miner) {
  auto it = miners_.find(miner);
  if (it == miners_.end()) throw Error(Errc::UnknownActor, "file miner " + miner);
  return it->second;
}

const ChunkStore::Slot& ChunkStore::slot(const MinerId& miner) const {
  auto it = miners_.find(miner);
  if (it == miners_.end()) throw Error(Errc::UnknownActor, "file miner " + miner);
  return it->second;
}

void ChunkStore::add_miner(const MinerId& miner, std::uint64_t free_space) {
  miners_[miner].free_space = free_space;
}

bool ChunkStore::has_miner(const MinerId& miner) const { return miners_.count(miner) > 0; }

std::uint64_t ChunkStore::free_space(const MinerId& miner) const { return slot(miner).free_space; }

std::uint64_t ChunkStore::stored_bytes(const MinerId& miner) const {
  std::uint64_t n = 0;
  for (const auto& [_, e] : slot(miner).chunks) n += e.data.size();
  return n;
}

ChunkAddress ChunkStore::put(const MinerId& miner, Bytes data) {
  Slot& s = slot(miner);
  ChunkAddress addr{miner, sha256(data), data.size()};
  if (s.chunks.count(addr.chunk_digest)) {
    return addr;
  }
  if (s.free_space < data.size()) {
    throw Error(Errc::MinerFull, "miner " + miner + " has " + std::to_string(s.free_space) +
                                     " bytes free, chunk needs " + std::to_string(data.size()));
  }
  s.free_space -= data.size();
  s.expired.erase(addr.chunk_digest);
  s.chunks.emplace(addr.chunk_digest, Entry{std::move(data), std::nullopt});
  return addr;
}

void ChunkStore::purge(Slot& s, std::map<Digest, Entry>::iterator it) {
  s.free_space += it->second.data.size();
  s.expired.insert(it->first);
  s.chunks.erase(it);
}

Bytes ChunkStore::fetch(const ChunkAddress& address, Tick now) {
  auto mit = miners_.find(address.miner_id);
  if (mit == miners_.end()) throw ChunkError(Errc::ChunkMissing, address);
  Slot& s = mit->second;
  auto it = s.chunks.find(address.chunk_digest);
  if (it == s.chunks.end()) {
    throw ChunkError(s.expired.count(address.chunk_digest) ? Errc::ChunkExpired : Errc::ChunkMissing,
                     address);
  }
  if (it->second.expires_at && now > *it->second.expires_at) {
    purge(s, it);
    throw ChunkError(Errc::ChunkExpired, address);
  }
  return it->second.data;
}

void ChunkStore::start_expiry(const ChunkAddress& address, Tick expires_at) {
  auto& s = slot(address.miner_id);
  auto it = s.chunks.find(address.chunk_digest);
  if (it != s.chunks.end() && !it->second.expires_at) {
    it->second.expires_at = expires_at;
  }
}

std::optional<Tick> ChunkStore::expires_at(const ChunkAddress& address) const {
  const auto& s = slot(address.miner_id);
  auto it = s.chunks.find(address.chunk_digest);
  if (it == s.chunks.end()) return std::nullopt;
  return it->second.expires_at;
}

bool ChunkStore::erase(const ChunkAddress& address) {
  auto mit = miners_.find(address.miner_id);
  if (mit == miners_.end()) return false;
  auto& s = mit->second;
  auto it = s.chunks.find(address.chunk_digest);
  if (it == s.chunks.end()) return false;
  s.free_space += it->second.data.size();
  s.chunks.erase(it);
  return true;
}

std::size_t ChunkStore::collect_expired(Tick now) {
  std::size_t purged = 0;
  for (auto& [_, s] : miners_) {
    for (auto it = s.chunks.begin(); it != s.chunks.end();) {
      auto next = std::next(it);
      if (it->second.expires_at && now > *it->second.expires_at) {
        purge(s, it);
        ++purged;
      }
      it = next;
    }
  }
  return purged;
}

std::vector<ChunkAddress> store_chunks(std::span<const Chunk> chunks, ChunkStore& store) {
  std::map<MinerId, std::uint64_t> demand;
  for (const auto& c : chunks) demand[c.miner_id] += c.data.size();
  for (const auto& [miner, bytes] : demand) {
    if (!store.has_miner(miner)) throw Error(Errc::UnknownActor, "file miner " + miner);
    if (store.free_space(miner) < bytes) {
      throw Error(Errc::MinerFull, "miner " + miner + " cannot hold " + std::to_string(bytes) + " bytes");
    }
  }
  std::vector<ChunkAddress> addresses;
  addresses.reserve(chunks.size());
  for (const auto& c : chunks) {
    addresses.push_back(store.put(c.miner_id, c.data));
  }
  return addresses;
}

Digest DeliveryContract::compute_digest() const {
  CanonicalWriter w;
  w.field(ByteView(recipient_public_key));
  w.field(std::uint64_t{chunk_addresses.size()});
  for (const auto& a : chunk_addresses) {
    w.field(a.miner_id).field(a.chunk_digest).field(a.length);
  }
  w.field(recipient_address);
  return w.digest();
}

DeliveryContract make_contract(Bytes recipient_public_key, std::vector<ChunkAddress> addresses,
                               const Digest& recipient_address) {
  if (addresses.empty()) {
    throw Error(Errc::EmptyContract, "a delivery contract needs at least one chunk address");
  }
  DeliveryContract c;
  c.recipient_public_key = std::move(recipient_public_key);
  c.chunk_addresses = std::move(addresses);
  c.recipient_address = recipient_address;
  c.contract_digest = c.compute_digest();
  return c;
}

DeliveryContract issue_contract(const PseudonymousId& issuer, Bytes recipient_public_key,
                                std::vector<ChunkAddress> addresses, const Digest& recipient_address,
                                const Digest& listing_id, Chain& chain, Tick now) {
  auto contract = make_contract(std::move(recipient_public_key), std::move(addresses), recipient_address);
  Payload p;
  p.listing = listing_id;
  p.contract = contract.contract_digest;
  chain.append_block({make_transaction(issuer, TxKind::ContractIssued, recipient_address, std::move(p), now)},
                     now);
  return contract;
}

std::string contract_to_json(const DeliveryContract& contract) {
  nlohmann::json j = nlohmann::json::object();
  j["recipient_public_key"] = to_hex(contract.recipient_public_key);
  nlohmann::json addrs = nlohmann::json::array();
  for (const auto& a : contract.chunk_addresses) {
    addrs.push_back({{"miner_id", a.miner_id}, {"chunk_digest", a.chunk_digest.hex()}, {"length", a.length}});
  }
  j["chunk_addresses"] = std::move(addrs);
  j["recipient_address"] = contract.recipient_address.hex();
  j["contract_digest"] = contract.contract_digest.hex();
  return j.dump();
}

DeliveryContract contract_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::BadFormat, e.what());
  }
  DeliveryContract c;
  c.recipient_public_key = from_hex(detail::string(j, "recipient_public_key"));
  const auto& addrs = detail::require(j, "chunk_addresses");
  if (!addrs.is_array()) throw Error(Errc::BadFormat, "chunk_addresses must be an array");
  for (const auto& a : addrs) {
    c.chunk_addresses.push_back(
        {detail::string(a, "miner_id"), detail::digest(a, "chunk_digest"), detail::u64(a, "length")});
  }
  c.recipient_address = detail::digest(j, "recipient_address");
  c.contract_digest = detail::digest(j, "contract_digest");
  if (c.compute_digest() != c.contract_digest) {
    throw Error(Errc::ContractDigestMismatch, "stored contract digest does not cover its fields");
  }
  return c;
}

Bytes retrieve_and_join(const DeliveryContract& contract, ChunkStore& store, Tick now, Tick t_D) {
  if (contract.compute_digest() != contract.contract_digest) {
    throw Error(Errc::ContractDigestMismatch, "contract fields were altered");
  }
  std::vector<Bytes> chunks;
  chunks.reserve(contract.chunk_addresses.size());
  for (const auto& addr : contract.chunk_addresses) {
    Bytes data = store.fetch(addr, now);
    if (data.size() != addr.length || sha256(data) != addr.chunk_digest) {
      throw ChunkError(Errc::ChunkMissing, addr);
    }
    store.start_expiry(addr, now + t_D);
    chunks.push_back(std::move(data));
  }
  return join(chunks);
}

Bytes decrypt_and_record(const DeliveryContract& contract, ByteView ciphertext,
                         const PseudonymousId& recipient, const Digest& seller,
                         const Digest& listing_id, Chain& chain, Tick now) {
  if (recipient.public_key() != contract.recipient_public_key) {
    throw Error(Errc::DecryptionFailure, "key does not match the contract recipient");
  }
  Bytes plaintext = decrypt(ciphertext, recipient.private_key());
  Payload p;
  p.listing = listing_id;
  p.contract = contract.contract_digest;
  chain.append_block({make_transaction(recipient, TxKind::DeliveryCompleted, seller, std::move(p), now)}, now);
  return plaintext;
}

}  // namespace newstrad
