#pragma once

#include <map>
#include <optional>

#include "newstrad/common.hpp"

namespace newstrad {

/// Inputs to the pseudonym derivation: a timestamp, a nonce, caller-supplied
/// random text and a salt digest. The salt is provided by the caller so runs
/// are reproducible.
struct SignatureInputs {
  Tick timestamp = 0;
  std::uint64_t nonce = 0;
  Bytes text;
  Digest salt;
};

/// digest(t || n || text || h) over the canonical length-prefixed encoding.
/// Throws Error(EmptyText) when text is empty.
Digest derive_pseudonym(const SignatureInputs& inputs);

/// Ed25519 key size constants.
inline constexpr std::size_t kPublicKeySize = 32;
inline constexpr std::size_t kPrivateKeySize = 64;
inline constexpr std::size_t kKeySeedSize = 32;
inline constexpr std::size_t kSignatureSize = 64;

/// A pseudonymous participant: the derived pseudonym plus an Ed25519 key pair
/// bound to it. The private key stays in process memory and is wiped on
/// destruction; nothing in the ledger or reports ever serializes it.
class PseudonymousId {
 public:
  PseudonymousId(Digest pseudonym, Bytes public_key, Bytes private_key);
  PseudonymousId(const PseudonymousId& other);
  PseudonymousId& operator=(const PseudonymousId& other);
  PseudonymousId(PseudonymousId&&) noexcept = default;
  PseudonymousId& operator=(PseudonymousId&&) noexcept = default;
  ~PseudonymousId();

  const Digest& pseudonym() const { return pseudonym_; }
  const Bytes& public_key() const { return public_key_; }
  ByteView private_key() const { return private_key_; }

 private:
  Digest pseudonym_;
  Bytes public_key_;
  Bytes private_key_;
};

/// Fresh random key pair.
PseudonymousId generate_identity(const SignatureInputs& inputs);
/// Key pair derived from an explicit seed, for deterministic simulations.
PseudonymousId generate_identity(const SignatureInputs& inputs,
                                 std::span<const std::uint8_t, kKeySeedSize> key_seed);

/// Detached Ed25519 signature. The message must be nonempty.
Bytes sign(const PseudonymousId& id, ByteView message);

/// Throws Error(MalformedKey) when the key is not a valid Ed25519 point.
bool verify(ByteView public_key, ByteView message, ByteView signature);

/// Local store of identities this process may sign for (the simulator holds
/// every actor; a real node would hold only its own).
class KeyRing {
 public:
  void add(PseudonymousId id);
  bool contains(const Digest& pseudonym) const;
  /// Throws Error(UnknownActor).
  const PseudonymousId& at(const Digest& pseudonym) const;

 private:
  std::map<Digest, PseudonymousId> ids_;
};

}  // namespace newstrad
