#pragma once

#include <array>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "newstrad/identity.hpp"
#include "newstrad/ledger.hpp"

namespace fixtures {

using namespace newstrad;

inline std::filesystem::path scenario_dir() { return NEWSTRAD_SCENARIO_DIR; }

inline SignatureInputs inputs_for(const std::string& label, std::uint64_t nonce = 1) {
  SignatureInputs in;
  in.timestamp = 1;
  in.nonce = nonce;
  in.text = to_bytes("fixture/" + label);
  in.salt = sha256(std::string_view("fixture-salt"));
  return in;
}

inline PseudonymousId identity(const std::string& label) {
  Digest seed = sha256(std::string_view("fixture-key/" + label));
  return generate_identity(inputs_for(label), std::span<const std::uint8_t, 32>(seed.bytes));
}

inline Transaction payment(const PseudonymousId& from, const Digest& to, const Coin& amount, Tick ts) {
  Payload p;
  p.amount = amount;
  return make_transaction(from, TxKind::Payment, to, p, ts);
}

// A chain of `blocks` blocks (genesis included) carrying a mix of payments
// and listings with distinct contents.
inline Chain sample_chain(std::size_t blocks, std::size_t txs_per_block = 2) {
  auto alice = identity("alice");
  auto bob = identity("bob");
  Chain chain;
  for (std::size_t i = 1; i < blocks; ++i) {
    std::vector<Transaction> txs;
    for (std::size_t t = 0; t < txs_per_block; ++t) {
      Tick ts = i * 10 + t;
      if (t % 2 == 0) {
        txs.push_back(payment(alice, bob.pseudonym(), Coin(i * 3 + t) / 2, ts));
      } else {
        Payload p;
        p.listing = sha256("content " + std::to_string(i) + "/" + std::to_string(t));
        p.attrs["headline"] = "headline " + std::to_string(i);
        p.attrs["price"] = std::to_string(i);
        txs.push_back(make_transaction(bob, TxKind::ListingPosted, std::nullopt, p, ts));
      }
    }
    chain.append_block(std::move(txs), i * 10 + txs_per_block);
  }
  return chain;
}

inline Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
  Bytes out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng() >> 56);
  return out;
}

}  // namespace fixtures

#include "newstrad/storage.hpp"

namespace fixtures {

struct AllocationInstance {
  std::vector<FileMinerProfile> miners;
  AllocationRequest request;
};

inline Coin random_rational(std::mt19937_64& rng, std::uint64_t max_num, std::uint64_t max_den) {
  std::uniform_int_distribution<std::uint64_t> num(0, max_num);
  std::uniform_int_distribution<std::uint64_t> den(1, max_den);
  return Coin(num(rng)) / Coin(den(rng));
}

// 1-50 miners with fees in [0, 300] / [1, 100], a file of 1 to 10^6 bytes and
// a budget of up to 400 coin per byte.
inline AllocationInstance random_allocation(std::mt19937_64& rng, std::size_t max_miners = 50) {
  AllocationInstance inst;
  std::uniform_int_distribution<std::size_t> count(1, max_miners);
  std::uniform_int_distribution<std::uint64_t> size(1, 1'000'000);
  inst.request.file_size = size(rng);
  std::size_t n = count(rng);
  std::uniform_int_distribution<std::uint64_t> space(0, inst.request.file_size);
  for (std::size_t i = 0; i < n; ++i) {
    FileMinerProfile m;
    m.miner_id = "m" + std::to_string(i);
    m.fee = random_rational(rng, 300, 100);
    m.free_space = (rng() % 8 == 0) ? 0 : space(rng);
    inst.miners.push_back(m);
  }
  inst.request.budget = Coin(inst.request.file_size) * random_rational(rng, 400, 100);
  std::uniform_int_distribution<std::size_t> thr(1, n + 2);
  inst.request.threshold = thr(rng);
  return inst;
}

}  // namespace fixtures
