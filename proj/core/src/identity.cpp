#include "newstrad/identity.hpp"

#include <sodium.h>

namespace newstrad {

Digest derive_pseudonym(const SignatureInputs& inputs) {
  if (inputs.text.empty()) {
    throw Error(Errc::EmptyText, "signature text must be nonempty");
  }
  CanonicalWriter w;
  w.field(std::uint64_t{inputs.timestamp})
      .field(inputs.nonce)
      .field(ByteView(inputs.text))
      .field(inputs.salt);
  return w.digest();
}

PseudonymousId::PseudonymousId(Digest pseudonym, Bytes public_key, Bytes private_key)
    : pseudonym_(pseudonym), public_key_(std::move(public_key)), private_key_(std::move(private_key)) {}

PseudonymousId::PseudonymousId(const PseudonymousId& other) = default;

PseudonymousId& PseudonymousId::operator=(const PseudonymousId& other) {
  if (this != &other) {
    if (!private_key_.empty()) sodium_memzero(private_key_.data(), private_key_.size());
    pseudonym_ = other.pseudonym_;
    public_key_ = other.public_key_;
    private_key_ = other.private_key_;
  }
  return *this;
}

PseudonymousId::~PseudonymousId() {
  if (!private_key_.empty()) {
    sodium_memzero(private_key_.data(), private_key_.size());
  }
}

PseudonymousId generate_identity(const SignatureInputs& inputs) {
  ensure_crypto_initialized();
  std::array<std::uint8_t, kKeySeedSize> seed{};
  randombytes_buf(seed.data(), seed.size());
  auto id = generate_identity(inputs, seed);
  sodium_memzero(seed.data(), seed.size());
  return id;
}

PseudonymousId generate_identity(const SignatureInputs& inputs,
                                 std::span<const std::uint8_t, kKeySeedSize> key_seed) {
  ensure_crypto_initialized();
  Digest pseudonym = derive_pseudonym(inputs);
  Bytes pk(crypto_sign_PUBLICKEYBYTES);
  Bytes sk(crypto_sign_SECRETKEYBYTES);
  crypto_sign_seed_keypair(pk.data(), sk.data(), key_seed.data());
  return PseudonymousId(pseudonym, std::move(pk), std::move(sk));
}

Bytes sign(const PseudonymousId& id, ByteView message) {
  if (message.empty()) {
    throw Error(Errc::InvalidArgument, "cannot sign an empty message");
  }
  ensure_crypto_initialized();
  Bytes sig(crypto_sign_BYTES);
  crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), id.private_key().data());
  return sig;
}

bool verify(ByteView public_key, ByteView message, ByteView signature) {
  ensure_crypto_initialized();
  if (public_key.size() != crypto_sign_PUBLICKEYBYTES) {
    throw Error(Errc::MalformedKey, "public key must be 32 bytes");
  }
  // Rejects encodings that are not points on the curve.
  std::array<std::uint8_t, crypto_scalarmult_curve25519_BYTES> curve{};
  if (crypto_sign_ed25519_pk_to_curve25519(curve.data(), public_key.data()) != 0) {
    throw Error(Errc::MalformedKey, "public key is not a valid curve point");
  }
  if (signature.size() != crypto_sign_BYTES) {
    return false;
  }
  return crypto_sign_verify_detached(signature.data(), message.data(), message.size(),
                                     public_key.data()) == 0;
}

void KeyRing::add(PseudonymousId id) {
  auto key = id.pseudonym();
  ids_.insert_or_assign(key, std::move(id));
}

bool KeyRing::contains(const Digest& pseudonym) const { return ids_.count(pseudonym) > 0; }

const PseudonymousId& KeyRing::at(const Digest& pseudonym) const {
  auto it = ids_.find(pseudonym);
  if (it == ids_.end()) {
    throw Error(Errc::UnknownActor, pseudonym.hex());
  }
  return it->second;
}

}  // namespace newstrad
