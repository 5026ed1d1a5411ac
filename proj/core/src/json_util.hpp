#pragma once

// Strict field accessors shared by the JSON readers. Every failure surfaces
// as Error(BadFormat) naming the field.

#include <cmath>
#include <charconv>

#include "json.hpp"
#include "newstrad/common.hpp"

namespace newstrad::detail {

inline const nlohmann::json& require(const nlohmann::json& j, const char* key) {
  if (!j.is_object()) throw Error(Errc::BadFormat, std::string("expected object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) throw Error(Errc::BadFormat, std::string("missing field '") + key + "'");
  return *it;
}

inline std::string string(const nlohmann::json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_string()) throw Error(Errc::BadFormat, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

inline std::uint64_t u64(const nlohmann::json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw Error(Errc::BadFormat, std::string("field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

inline Digest digest(const nlohmann::json& j, const char* key) {
  try {
    return Digest::from_hex(string(j, key));
  } catch (const Error& e) {
    throw Error(Errc::BadFormat, std::string("field '") + key + "': " + e.what());
  }
}

inline std::optional<Digest> optional_digest(const nlohmann::json& j, const char* key) {
  const auto& v = require(j, key);
  if (v.is_null()) return std::nullopt;
  return digest(j, key);
}

/// Amount stored in a dump: must already be in canonical form.
inline Coin canonical_coin(const nlohmann::json& v) {
  if (!v.is_string()) throw Error(Errc::BadFormat, "amount must be a string");
  auto text = v.get<std::string>();
  Coin c = parse_coin(text);
  if (format_coin(c) != text) throw Error(Errc::BadFormat, "non-canonical amount '" + text + "'");
  return c;
}

/// Lenient coin reader for human-written inputs: integers, decimal numbers
/// (read via their shortest round-trip text) and "a/b" or "2.5" strings.
inline Coin coin_value(const nlohmann::json& v, const char* what) {
  if (v.is_string()) return parse_coin(v.get<std::string>());
  if (v.is_number_unsigned()) return Coin(v.get<std::uint64_t>());
  if (v.is_number_integer()) return Coin(v.get<std::int64_t>());
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (!std::isfinite(d)) throw Error(Errc::BadFormat, std::string(what) + " must be finite");
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), d, std::chars_format::fixed);
    if (ec != std::errc()) throw Error(Errc::BadFormat, std::string(what) + " out of range");
    return parse_coin(std::string_view(buf, static_cast<std::size_t>(end - buf)));
  }
  throw Error(Errc::BadFormat, std::string(what) + " must be a number or rational string");
}

}  // namespace newstrad::detail
