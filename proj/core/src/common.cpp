#include "newstrad/common.hpp"

#include <sodium.h>

#include <charconv>
#include <mutex>

namespace newstrad {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::DuplicateContent: return "DuplicateContent";
    case Errc::BadSignature: return "BadSignature";
    case Errc::EmptyBatch: return "EmptyBatch";
    case Errc::EmptyText: return "EmptyText";
    case Errc::MalformedKey: return "MalformedKey";
    case Errc::UnknownListing: return "UnknownListing";
    case Errc::InsufficientFunds: return "InsufficientFunds";
    case Errc::NoMinersAvailable: return "NoMinersAvailable";
    case Errc::ZeroFileSize: return "ZeroFileSize";
    case Errc::NoCandidates: return "NoCandidates";
    case Errc::InsufficientCapacity: return "InsufficientCapacity";
    case Errc::SizeMismatch: return "SizeMismatch";
    case Errc::MinerFull: return "MinerFull";
    case Errc::EmptyContract: return "EmptyContract";
    case Errc::ContractDigestMismatch: return "ContractDigestMismatch";
    case Errc::ChunkMissing: return "ChunkMissing";
    case Errc::ChunkExpired: return "ChunkExpired";
    case Errc::DecryptionFailure: return "DecryptionFailure";
    case Errc::NoSuchPayment: return "NoSuchPayment";
    case Errc::NoSuchService: return "NoSuchService";
    case Errc::PastEvent: return "PastEvent";
    case Errc::UnknownActor: return "UnknownActor";
    case Errc::BadScenario: return "BadScenario";
    case Errc::BadFormat: return "BadFormat";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

Error::Error(Errc code) : std::runtime_error(std::string(errc_name(code))), code_(code) {}

void ensure_crypto_initialized() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) {
      throw std::runtime_error("libsodium initialization failed");
    }
  });
}

Digest sha256(ByteView data) {
  ensure_crypto_initialized();
  Digest d;
  crypto_hash_sha256(d.bytes.data(), data.data(), data.size());
  return d;
}

Digest sha256(std::string_view data) {
  return sha256(ByteView(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw Error(Errc::BadFormat, "odd-length hex string");
  }
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) {
      throw Error(Errc::BadFormat, "invalid hex digit");
    }
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

Digest Digest::from_hex(std::string_view hex) {
  if (hex.size() != 64) {
    throw Error(Errc::BadFormat, "digest must be 64 hex characters");
  }
  auto raw = newstrad::from_hex(hex);
  Digest d;
  std::copy(raw.begin(), raw.end(), d.bytes.begin());
  return d;
}

std::string Digest::hex() const { return to_hex(bytes); }

bool Digest::is_zero() const {
  for (auto b : bytes) {
    if (b != 0) return false;
  }
  return true;
}

Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

namespace {

using boost::multiprecision::cpp_int;

cpp_int parse_integer(std::string_view digits) {
  if (digits.empty()) {
    throw Error(Errc::BadFormat, "empty number");
  }
  cpp_int value = 0;
  for (char c : digits) {
    if (c < '0' || c > '9') {
      throw Error(Errc::BadFormat, "invalid digit in number: " + std::string(digits));
    }
    value = value * 10 + (c - '0');
  }
  return value;
}

}  // namespace

Coin parse_coin(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  Coin value;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    cpp_int den = parse_integer(text.substr(slash + 1));
    if (den == 0) {
      throw Error(Errc::BadFormat, "zero denominator");
    }
    value = Coin(parse_integer(text.substr(0, slash)), den);
  } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
    auto whole = text.substr(0, dot);
    auto frac = text.substr(dot + 1);
    cpp_int scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    cpp_int num = (whole.empty() ? cpp_int(0) : parse_integer(whole)) * scale +
                  (frac.empty() ? cpp_int(0) : parse_integer(frac));
    if (whole.empty() && frac.empty()) {
      throw Error(Errc::BadFormat, "empty number");
    }
    value = Coin(num, scale);
  } else {
    value = Coin(parse_integer(text));
  }
  return negative ? Coin(-value) : value;
}

std::string format_coin(const Coin& value) { return value.str(); }

void CanonicalWriter::put_length(std::uint64_t n) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(n >> shift));
  }
}

CanonicalWriter& CanonicalWriter::field(ByteView data) {
  put_length(data.size());
  out_.insert(out_.end(), data.begin(), data.end());
  return *this;
}

CanonicalWriter& CanonicalWriter::field(std::string_view text) {
  return field(ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

CanonicalWriter& CanonicalWriter::field(std::uint64_t value) {
  std::array<std::uint8_t, 8> be{};
  for (int i = 0; i < 8; ++i) {
    be[i] = static_cast<std::uint8_t>(value >> (56 - 8 * i));
  }
  return field(ByteView(be));
}

CanonicalWriter& CanonicalWriter::field(const Digest& d) { return field(ByteView(d.bytes)); }

CanonicalWriter& CanonicalWriter::field(const Coin& value) { return field(format_coin(value)); }

}  // namespace newstrad
