#include "ivbc/ledger.hpp"

namespace ivbc {

const char* ledger_error_name(LedgerError e) {
    switch (e) {
    case LedgerError::DuplicateIdentity: return "DuplicateIdentity";
    case LedgerError::InsufficientBalance: return "InsufficientBalance";
    case LedgerError::UnknownVehicle: return "UnknownVehicle";
    case LedgerError::SelfTransfer: return "SelfTransfer";
    case LedgerError::ZeroAmount: return "ZeroAmount";
    }
    return "Unknown";
}

const char* tx_rule_name(TxRule r) {
    switch (r) {
    case TxRule::UnknownSender: return "UnknownSender";
    case TxRule::BadSignature: return "BadSignature";
    case TxRule::NonceReplay: return "NonceReplay";
    case TxRule::TransferNotFromSender: return "TransferNotFromSender";
    case TxRule::TransferInvalid: return "TransferInvalid";
    }
    return "Unknown";
}

std::optional<LedgerError> LedgerState::register_vehicle(const Hash32& ivtp_id,
                                                         std::uint64_t initial_balance) {
    if (balances_.contains(ivtp_id)) return LedgerError::DuplicateIdentity;
    balances_[ivtp_id] = initial_balance;
    return std::nullopt;
}

std::optional<LedgerError> LedgerState::apply_transfer(const Hash32& from, const Hash32& to,
                                                       std::uint64_t amount) {
    if (amount == 0) return LedgerError::ZeroAmount;
    if (from == to) return LedgerError::SelfTransfer;
    auto from_it = balances_.find(from);
    auto to_it = balances_.find(to);
    if (from_it == balances_.end() || to_it == balances_.end())
        return LedgerError::UnknownVehicle;
    if (from_it->second < amount) return LedgerError::InsufficientBalance;
    from_it->second -= amount;
    to_it->second += amount;
    return std::nullopt;
}

std::optional<std::uint64_t> LedgerState::balance(const Hash32& ivtp_id) const {
    auto it = balances_.find(ivtp_id);
    if (it == balances_.end()) return std::nullopt;
    return it->second;
}

std::uint64_t LedgerState::supply() const {
    std::uint64_t total = 0;
    for (const auto& [_, bal] : balances_) total += bal;
    return total;
}

Hash32 LedgerState::leader() const {
    if (balances_.empty()) throw EmptyLedger();
    // Map order is ascending by id, so keeping strict inequality picks the
    // lexicographically smallest id among ties.
    auto best = balances_.begin();
    for (auto it = std::next(balances_.begin()); it != balances_.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return best->first;
}

std::uint64_t LedgerState::nonce_watermark(const Hash32& sender) const {
    auto it = watermarks_.find(sender);
    return it == watermarks_.end() ? 0 : it->second;
}

void LedgerState::set_nonce_watermark(const Hash32& sender, std::uint64_t nonce) {
    watermarks_[sender] = nonce;
}

Bytes LedgerState::encode() const {
    ByteWriter w;
    w.u64(balances_.size());
    for (const auto& [id, bal] : balances_) {
        w.hash(id);
        w.u64(bal);
    }
    w.u64(watermarks_.size());
    for (const auto& [id, nonce] : watermarks_) {
        w.hash(id);
        w.u64(nonce);
    }
    return w.take();
}

LedgerState LedgerState::decode(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    LedgerState s;
    std::uint64_t n = r.u64();
    if (n > r.remaining() / 40) throw DecodeError("balance count exceeds record");
    for (std::uint64_t i = 0; i < n; ++i) {
        Hash32 id = r.hash();
        s.balances_[id] = r.u64();
    }
    std::uint64_t m = r.u64();
    if (m > r.remaining() / 40) throw DecodeError("watermark count exceeds record");
    for (std::uint64_t i = 0; i < m; ++i) {
        Hash32 id = r.hash();
        s.watermarks_[id] = r.u64();
    }
    r.expect_done();
    return s;
}

RewardReport reward_for_block(LedgerState& ledger, const Block& block,
                              const ChainParams& params) {
    RewardReport report;
    const Hash32& sealer = block.header.sealer_ivtp_id;
    for (std::size_t i = 0; i < block.transactions.size(); ++i) {
        const Transaction& tx = block.transactions[i];
        if (tx.kind != TxKind::DataShare) continue;
        for (const Hash32& benefiter : tx.data_share.benefiters) {
            auto err = ledger.apply_transfer(benefiter, sealer, params.reward_amount);
            if (err) {
                report.skips.push_back({i, benefiter, *err});
            } else {
                report.transfers_applied += 1;
                report.units_to_sealer += params.reward_amount;
            }
        }
    }
    return report;
}

std::variant<RewardReport, TxFailure> apply_block(LedgerState& ledger, const Block& block,
                                                  const IdentityRegistry& registry,
                                                  const ChainParams& params) {
    LedgerState next = ledger;
    RewardReport report;
    const Hash32& sealer = block.header.sealer_ivtp_id;

    for (std::size_t i = 0; i < block.transactions.size(); ++i) {
        const Transaction& tx = block.transactions[i];
        const IdentityRegistry::Entry* sender = registry.find(tx.sender_ivtp_id);
        if (sender == nullptr) return TxFailure{i, TxRule::UnknownSender, std::nullopt};
        if (!tx.signature_valid(sender->public_key))
            return TxFailure{i, TxRule::BadSignature, std::nullopt};
        if (tx.nonce <= next.nonce_watermark(tx.sender_ivtp_id))
            return TxFailure{i, TxRule::NonceReplay, std::nullopt};
        next.set_nonce_watermark(tx.sender_ivtp_id, tx.nonce);

        switch (tx.kind) {
        case TxKind::RewardTransfer: {
            if (tx.transfer.from != tx.sender_ivtp_id)
                return TxFailure{i, TxRule::TransferNotFromSender, std::nullopt};
            auto err = next.apply_transfer(tx.transfer.from, tx.transfer.to, tx.transfer.amount);
            if (err) return TxFailure{i, TxRule::TransferInvalid, err};
            break;
        }
        case TxKind::DataShare: {
            // Rewards materialize inline, in benefiter order, so ledger
            // state is a pure fold over the transaction sequence.
            for (const Hash32& benefiter : tx.data_share.benefiters) {
                auto err = next.apply_transfer(benefiter, sealer, params.reward_amount);
                if (err) {
                    report.skips.push_back({i, benefiter, *err});
                } else {
                    report.transfers_applied += 1;
                    report.units_to_sealer += params.reward_amount;
                }
            }
            break;
        }
        }
    }

    ledger = std::move(next);
    return report;
}

} // namespace ivbc
