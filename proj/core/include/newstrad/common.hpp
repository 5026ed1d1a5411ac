#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace newstrad {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Logical simulation time. Never wall-clock.
using Tick = std::uint64_t;

/// Exact coin amounts, fees and budgets.
using Coin = boost::multiprecision::cpp_rational;

enum class Errc {
  InvalidArgument,
  DuplicateContent,
  BadSignature,
  EmptyBatch,
  EmptyText,
  MalformedKey,
  UnknownListing,
  InsufficientFunds,
  NoMinersAvailable,
  ZeroFileSize,
  NoCandidates,
  InsufficientCapacity,
  SizeMismatch,
  MinerFull,
  EmptyContract,
  ContractDigestMismatch,
  ChunkMissing,
  ChunkExpired,
  DecryptionFailure,
  NoSuchPayment,
  NoSuchService,
  PastEvent,
  UnknownActor,
  BadScenario,
  BadFormat,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  explicit Error(Errc code);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// 256-bit SHA-256 digest. Ordered bytewise, which matches the ordering of
/// the lowercase hex rendering.
struct Digest {
  std::array<std::uint8_t, 32> bytes{};

  static Digest zero() { return Digest{}; }
  static Digest from_hex(std::string_view hex);

  std::string hex() const;
  bool is_zero() const;

  friend auto operator<=>(const Digest&, const Digest&) = default;
};

Digest sha256(ByteView data);
Digest sha256(std::string_view data);

std::string to_hex(ByteView data);
/// Strict lowercase hex decoding; throws Error(BadFormat) otherwise.
Bytes from_hex(std::string_view hex);

Bytes to_bytes(std::string_view s);

/// Accepts "7", "-3", "5/2" or "2.5"; throws Error(BadFormat).
Coin parse_coin(std::string_view text);
/// Canonical rendering: "160", "5/2", "-1/3".
std::string format_coin(const Coin& value);

/// Length-prefixed field concatenation used for every digest and signature
/// input. Each field is an 8-byte big-endian length followed by its bytes.
class CanonicalWriter {
 public:
  CanonicalWriter& field(ByteView data);
  CanonicalWriter& field(std::string_view text);
  CanonicalWriter& field(std::uint64_t value);
  CanonicalWriter& field(const Digest& d);
  CanonicalWriter& field(const Coin& value);

  const Bytes& bytes() const { return out_; }
  Digest digest() const { return sha256(out_); }

 private:
  void put_length(std::uint64_t n);
  Bytes out_;
};

/// Must run before any libsodium primitive; idempotent and thread-safe.
void ensure_crypto_initialized();

}  // namespace newstrad
