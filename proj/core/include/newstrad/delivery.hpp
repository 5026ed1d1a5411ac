#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "newstrad/common.hpp"
#include "newstrad/identity.hpp"
#include "newstrad/ledger.hpp"
#include "newstrad/storage.hpp"

namespace newstrad {

/// Ephemeral public key (32) plus authentication tag (16).
inline constexpr std::size_t kEnvelopeOverhead = 48;
inline constexpr std::size_t kEphemeralSeedSize = 32;

/// Encrypts for the holder of `recipient_public_key` (an identity's Ed25519
/// key, converted to X25519). The envelope is a libsodium sealed box: an
/// ephemeral X25519 key agreement wrapping XSalsa20-Poly1305. Output size is
/// plaintext size + kEnvelopeOverhead. Throws Error(MalformedKey) or
/// Error(InvalidArgument) for an empty plaintext.
Bytes encrypt_for(ByteView recipient_public_key, ByteView plaintext);
/// Same envelope with the ephemeral key derived from `ephemeral_seed`, so a
/// seeded simulation produces identical ciphertexts.
Bytes encrypt_for(ByteView recipient_public_key, ByteView plaintext,
                  std::span<const std::uint8_t, kEphemeralSeedSize> ephemeral_seed);

/// Opens an envelope with the recipient's Ed25519 private key. Throws
/// Error(DecryptionFailure) on a wrong key or any tampering.
Bytes decrypt(ByteView ciphertext, ByteView recipient_private_key);

struct Chunk {
  MinerId miner_id;
  Bytes data;
};

/// File chopper: contiguous slices of the ciphertext sized by the plan, in
/// plan order. Throws Error(SizeMismatch) unless the allotments sum to the
/// ciphertext length.
std::vector<Chunk> chop(ByteView ciphertext, std::span<const Allotment> plan);

/// Kintsugi box: concatenation in order.
Bytes join(std::span<const Bytes> chunks);

struct ChunkAddress {
  MinerId miner_id;
  Digest chunk_digest;
  std::uint64_t length = 0;

  bool operator==(const ChunkAddress&) const = default;
};

/// Error raised by a chunk fetch; carries the address that failed.
class ChunkError : public Error {
 public:
  ChunkError(Errc code, ChunkAddress address);
  const ChunkAddress& address() const { return address_; }

 private:
  ChunkAddress address_;
};

/// Per-miner content-addressed chunk storage with deletion timers.
///
/// Expiry is lazy: a chunk whose timer has run out is purged the first time it
/// is touched (or by collect_expired) and its bytes return to the miner's
/// free space. Not internally synchronized; the simulator drives it from one
/// thread.
class ChunkStore {
 public:
  void add_miner(const MinerId& miner, std::uint64_t free_space);
  bool has_miner(const MinerId& miner) const;

  std::uint64_t free_space(const MinerId& miner) const;
  std::uint64_t stored_bytes(const MinerId& miner) const;

  /// Throws Error(MinerFull) or Error(UnknownActor).
  ChunkAddress put(const MinerId& miner, Bytes data);

  /// Exact chunk bytes. Throws ChunkError(ChunkExpired) once now is past the
  /// chunk's deletion tick, ChunkError(ChunkMissing) if never stored or deleted.
  Bytes fetch(const ChunkAddress& address, Tick now);

  /// Arms the deletion timer; a timer already running is left untouched.
  void start_expiry(const ChunkAddress& address, Tick expires_at);
  std::optional<Tick> expires_at(const ChunkAddress& address) const;

  /// Drops a chunk without honoring its timer (a misbehaving miner).
  bool erase(const ChunkAddress& address);

  /// Purges every chunk whose timer has run out; returns how many.
  std::size_t collect_expired(Tick now);

 private:
  struct Entry {
    Bytes data;
    std::optional<Tick> expires_at;
  };
  struct Slot {
    std::uint64_t free_space = 0;
    std::map<Digest, Entry> chunks;
    std::set<Digest> expired;
  };

  Slot& slot(const MinerId& miner);
  const Slot& slot(const MinerId& miner) const;
  static void purge(Slot& s, std::map<Digest, Entry>::iterator it);

  std::map<MinerId, Slot> miners_;
};

/// Stores each chunk at its plan miner and returns addresses in chunk order.
/// Capacity is checked for the whole batch first; on Error(MinerFull) nothing
/// is stored.
std::vector<ChunkAddress> store_chunks(std::span<const Chunk> chunks, ChunkStore& store);

/// The smart-contract tuple handed from seller to buyer.
struct DeliveryContract {
  Bytes recipient_public_key;
  std::vector<ChunkAddress> chunk_addresses;
  Digest recipient_address;
  Digest contract_digest;

  Digest compute_digest() const;
  bool operator==(const DeliveryContract&) const = default;
};

/// Throws Error(EmptyContract) for an empty address list.
DeliveryContract make_contract(Bytes recipient_public_key, std::vector<ChunkAddress> addresses,
                               const Digest& recipient_address);

/// Builds the contract and appends a ContractIssued transaction signed by the
/// issuer (the seller), referencing the contract digest and listing.
DeliveryContract issue_contract(const PseudonymousId& issuer, Bytes recipient_public_key,
                                std::vector<ChunkAddress> addresses, const Digest& recipient_address,
                                const Digest& listing_id, Chain& chain, Tick now);

std::string contract_to_json(const DeliveryContract& contract);
/// Throws Error(BadFormat), or Error(ContractDigestMismatch) if the stored
/// digest does not cover the parsed fields.
DeliveryContract contract_from_json(std::string_view text);

/// Collects the chunks in address order, checks each against its digest and
/// length, arms every chunk's deletion timer at now + t_D and joins them.
/// Throws Error(ContractDigestMismatch) or ChunkError.
Bytes retrieve_and_join(const DeliveryContract& contract, ChunkStore& store, Tick now, Tick t_D);

/// Decrypts with the recipient's key and appends DeliveryCompleted (signed by
/// the recipient, counterparty = seller).
Bytes decrypt_and_record(const DeliveryContract& contract, ByteView ciphertext,
                         const PseudonymousId& recipient, const Digest& seller,
                         const Digest& listing_id, Chain& chain, Tick now);

}  // namespace newstrad
