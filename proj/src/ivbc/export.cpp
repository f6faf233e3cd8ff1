#include "ivbc/export.hpp"

namespace ivbc {

OrderedJson tx_to_json(const Transaction& tx) {
    OrderedJson j;
    j["txid"] = to_hex(tx.txid());
    j["kind"] = tx.kind == TxKind::DataShare ? "data_share" : "reward_transfer";
    j["sender"] = to_hex(tx.sender_ivtp_id);
    j["nonce"] = tx.nonce;
    if (tx.kind == TxKind::DataShare) {
        j["message_digest"] = to_hex(tx.data_share.message_digest);
        OrderedJson benefiters = OrderedJson::array();
        for (const Hash32& b : tx.data_share.benefiters) benefiters.push_back(to_hex(b));
        j["benefiters"] = std::move(benefiters);
    } else {
        j["from"] = to_hex(tx.transfer.from);
        j["to"] = to_hex(tx.transfer.to);
        j["amount"] = tx.transfer.amount;
    }
    j["signature"] = to_hex(tx.signature);
    return j;
}

OrderedJson message_to_json(const sim::SafetyMessage& msg) {
    OrderedJson j;
    j["digest"] = to_hex(msg.digest());
    j["sender"] = to_hex(msg.sender_ivtp_id);
    j["kind"] = sim::safety_kind_name(msg.kind);
    j["x_mm"] = msg.x_mm;
    j["y_mm"] = msg.y_mm;
    j["tick"] = msg.tick;
    j["msg_nonce"] = msg.msg_nonce;
    j["signature"] = to_hex(msg.signature);
    return j;
}

OrderedJson block_to_dump_json(const Block& block) {
    OrderedJson j;
    j["height"] = block.header.height;
    j["hash"] = to_hex(block.hash());
    j["previous_hash"] = to_hex(block.header.previous_hash);
    j["merkle_root"] = to_hex(block.header.merkle_root);
    j["timestamp_ms"] = block.header.timestamp_ms;
    j["nonce"] = block.header.nonce;
    j["difficulty"] = block.header.difficulty;
    j["sealer"] = to_hex(block.header.sealer_ivtp_id);
    j["pod_score_m"] = block.pod.claimed_score_m;
    OrderedJson txs = OrderedJson::array();
    for (const Transaction& tx : block.transactions) txs.push_back(tx_to_json(tx));
    j["transactions"] = std::move(txs);
    return j;
}

std::string chain_to_jsonl(const std::vector<const ChainStore::StoredBlock*>& chain) {
    std::string out;
    for (const ChainStore::StoredBlock* sb : chain) {
        out += block_to_dump_json(sb->block).dump();
        out += '\n';
    }
    return out;
}

std::string chain_to_jsonl(const std::vector<Block>& chain) {
    std::string out;
    for (const Block& b : chain) {
        out += block_to_dump_json(b).dump();
        out += '\n';
    }
    return out;
}

OrderedJson ledger_to_json(const LedgerState& ledger) {
    OrderedJson balances = OrderedJson::object();
    for (const auto& [id, bal] : ledger.balances()) balances[to_hex(id)] = bal;
    OrderedJson j;
    j["balances"] = std::move(balances);
    j["supply"] = ledger.supply();
    return j;
}

} // namespace ivbc
