#pragma once

#include <iosfwd>
#include <string>

#include "newstrad/ledger.hpp"

namespace newstrad {

// Ledger dump format: one JSON object per block per line. Digests, keys and
// signatures are lowercase hex; amounts are canonical rational strings.

std::string block_to_json_line(const Block& block);
/// Throws Error(BadFormat) for malformed or non-canonical input.
Block block_from_json_line(std::string_view line);

std::string transaction_to_json(const Transaction& tx);

void write_ledger(std::ostream& out, const Chain& chain);
std::string dump_ledger(const Chain& chain);
/// Throws Error(BadFormat) naming the offending line.
Chain read_ledger(std::istream& in);

}  // namespace newstrad
