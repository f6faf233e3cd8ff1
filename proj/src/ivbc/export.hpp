#pragma once

#include "ivbc/chain_store.hpp"
#include "ivbc/ledger.hpp"
#include "ivbc/sim/message.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace ivbc {

using OrderedJson = nlohmann::ordered_json;

OrderedJson tx_to_json(const Transaction& tx);
OrderedJson message_to_json(const sim::SafetyMessage& msg);

/// One chain-dump line: height, hashes, nonce, difficulty, sealer and the
/// transaction array (timestamp added so history can be range-filtered).
OrderedJson block_to_dump_json(const Block& block);

/// JSON-lines dump of a block sequence, one object per line.
std::string chain_to_jsonl(const std::vector<const ChainStore::StoredBlock*>& chain);
std::string chain_to_jsonl(const std::vector<Block>& chain);

/// Map of hex ivtp_id to balance plus the supply total.
OrderedJson ledger_to_json(const LedgerState& ledger);

} // namespace ivbc
