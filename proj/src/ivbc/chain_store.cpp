#include "ivbc/chain_store.hpp"

#include <algorithm>
#include <cassert>

namespace ivbc {

const char* block_rule_name(BlockRule r) {
    switch (r) {
    case BlockRule::Ok: return "Ok";
    case BlockRule::Linkage: return "Linkage";
    case BlockRule::Height: return "Height";
    case BlockRule::DifficultyTarget: return "DifficultyTarget";
    case BlockRule::NoTransactions: return "NoTransactions";
    case BlockRule::MerkleRootMismatch: return "MerkleRootMismatch";
    case BlockRule::TimestampOrder: return "TimestampOrder";
    case BlockRule::Pod: return "Pod";
    case BlockRule::Transaction: return "Transaction";
    }
    return "Unknown";
}

const char* extend_status_name(ExtendStatus s) {
    switch (s) {
    case ExtendStatus::ExtendedTip: return "ExtendedTip";
    case ExtendStatus::SideBranch: return "SideBranch";
    case ExtendStatus::Reorged: return "Reorged";
    case ExtendStatus::Orphaned: return "Orphaned";
    case ExtendStatus::Duplicate: return "Duplicate";
    case ExtendStatus::Invalid: return "Invalid";
    }
    return "Unknown";
}

std::string ValidationVerdict::describe() const {
    std::string out = block_rule_name(rule);
    if (rule == BlockRule::Pod && pod_error) {
        out += ":";
        out += pod_error_name(*pod_error);
    }
    if (rule == BlockRule::Transaction && tx_failure) {
        out += ":";
        out += tx_rule_name(tx_failure->rule);
        if (tx_failure->ledger_error) {
            out += ":";
            out += ledger_error_name(*tx_failure->ledger_error);
        }
        out += "@" + std::to_string(tx_failure->tx_index);
    }
    return out;
}

ValidationVerdict validate_block(const Block& block, const BlockHeader& parent,
                                 const LedgerState& parent_ledger,
                                 const IdentityRegistry& registry,
                                 std::uint64_t sealer_last_seal_tick, const ChainParams& params,
                                 LedgerState* out_ledger, RewardReport* out_rewards) {
    ValidationVerdict v;
    auto fail = [&](BlockRule rule) {
        v.rule = rule;
        return v;
    };

    if (block.header.previous_hash != parent.hash()) return fail(BlockRule::Linkage);
    if (block.header.height != parent.height + 1) return fail(BlockRule::Height);
    if (!block.header.meets_difficulty()) return fail(BlockRule::DifficultyTarget);
    if (block.transactions.empty()) return fail(BlockRule::NoTransactions);
    if (block.header.merkle_root != block.body_merkle_root())
        return fail(BlockRule::MerkleRootMismatch);
    if (block.header.timestamp_ms <= parent.timestamp_ms) return fail(BlockRule::TimestampOrder);

    if (auto pod_err = verify_pod(block.header, block.pod, registry, sealer_last_seal_tick,
                                  params.base_difficulty, params.unit_m)) {
        v.rule = BlockRule::Pod;
        v.pod_error = pod_err;
        return v;
    }

    LedgerState next = parent_ledger;
    auto applied = apply_block(next, block, registry, params);
    if (auto* failure = std::get_if<TxFailure>(&applied)) {
        v.rule = BlockRule::Transaction;
        v.tx_failure = *failure;
        return v;
    }
    if (out_ledger) *out_ledger = std::move(next);
    if (out_rewards) *out_rewards = std::get<RewardReport>(applied);
    return v;
}

ChainStore::ChainStore(IdentityRegistry registry, LedgerState genesis_ledger, ChainParams params)
    : registry_(std::move(registry)), params_(params) {
    const Block& g = genesis_block();
    StoredBlock stored{g, g.hash(), std::move(genesis_ledger), {}};
    tip_ = stored.hash;
    blocks_.emplace(stored.hash, std::move(stored));
}

const ChainStore::StoredBlock* ChainStore::find(const Hash32& hash) const {
    auto it = blocks_.find(hash);
    return it == blocks_.end() ? nullptr : &it->second;
}

std::uint64_t ChainStore::tip_height() const {
    return find(tip_)->block.header.height;
}

const LedgerState& ChainStore::tip_ledger() const {
    return find(tip_)->ledger_after;
}

Hash32 ChainStore::select_fork() const {
    const StoredBlock* best = nullptr;
    for (const auto& [hash, stored] : blocks_) {
        if (best == nullptr || stored.block.header.height > best->block.header.height ||
            (stored.block.header.height == best->block.header.height && hash < best->hash)) {
            best = &stored;
        }
    }
    return best->hash;
}

std::uint64_t ChainStore::last_seal_timestamp(const Hash32& from, const Hash32& vehicle) const {
    const StoredBlock* cur = find(from);
    while (cur != nullptr && cur->block.header.height > 0) {
        if (cur->block.header.sealer_ivtp_id == vehicle) return cur->block.header.timestamp_ms;
        cur = find(cur->block.header.previous_hash);
    }
    return 0;
}

std::vector<const ChainStore::StoredBlock*> ChainStore::chain_to(const Hash32& head) const {
    std::vector<const StoredBlock*> out;
    const StoredBlock* cur = find(head);
    while (cur != nullptr) {
        out.push_back(cur);
        if (cur->block.header.height == 0) break;
        cur = find(cur->block.header.previous_hash);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::vector<const ChainStore::StoredBlock*> ChainStore::ancestors(const Hash32& from,
                                                                  std::size_t count) const {
    std::vector<const StoredBlock*> newest_first;
    const StoredBlock* cur = find(from);
    while (cur != nullptr && newest_first.size() < count) {
        newest_first.push_back(cur);
        if (cur->block.header.height == 0) break;
        cur = find(cur->block.header.previous_hash);
    }
    std::reverse(newest_first.begin(), newest_first.end());
    return newest_first;
}

std::vector<Hash32> ChainStore::path_down_to(const Hash32& from, const Hash32& ancestor) const {
    std::vector<Hash32> out;
    Hash32 cur = from;
    while (cur != ancestor) {
        const StoredBlock* sb = find(cur);
        assert(sb != nullptr);
        out.push_back(cur);
        cur = sb->block.header.previous_hash;
    }
    return out;
}

const Hash32& ChainStore::fork_point(const Hash32& a, const Hash32& b) const {
    const StoredBlock* pa = find(a);
    const StoredBlock* pb = find(b);
    assert(pa && pb);
    while (pa->hash != pb->hash) {
        if (pa->block.header.height >= pb->block.header.height)
            pa = find(pa->block.header.previous_hash);
        else
            pb = find(pb->block.header.previous_hash);
        assert(pa && pb);
    }
    return find(pa->hash)->hash;
}

TipReport ChainStore::reselect_tip() {
    TipReport report;
    report.old_tip = tip_;
    Hash32 best = select_fork();
    report.new_tip = best;
    if (best == tip_) return report;

    const Hash32& fork = fork_point(tip_, best);
    report.rolled_back = path_down_to(tip_, fork);
    report.applied = path_down_to(best, fork);
    std::reverse(report.applied.begin(), report.applied.end());
    report.tip_changed = true;
    tip_ = best;
    return report;
}

ExtendOutcome ChainStore::extend(const Block& block) {
    Hash32 hash = block.hash();
    if (blocks_.contains(hash)) {
        return {ExtendStatus::Duplicate, {}, {false, tip_, tip_, {}, {}}};
    }

    if (!blocks_.contains(block.header.previous_hash)) {
        bool already_buffered =
            std::any_of(orphans_.begin(), orphans_.end(),
                        [&](const Block& o) { return o.header == block.header; });
        if (!already_buffered) {
            orphans_.push_back(block);
            if (orphans_.size() > kOrphanBufferCap) orphans_.pop_front();
        }
        return {ExtendStatus::Orphaned, {}, {false, tip_, tip_, {}, {}}};
    }

    ExtendOutcome outcome = store_validated(block, hash);
    if (outcome.status == ExtendStatus::Invalid) return outcome;

    attach_orphans();
    TipReport report = reselect_tip();
    ExtendStatus status;
    if (!report.tip_changed) {
        status = ExtendStatus::SideBranch;
    } else if (report.rolled_back.empty() && report.new_tip == hash &&
               report.old_tip == block.header.previous_hash) {
        status = ExtendStatus::ExtendedTip;
    } else if (report.rolled_back.empty() && !report.applied.empty() &&
               report.applied.front() == hash) {
        // Orphan attachment extended straight past the new block.
        status = ExtendStatus::ExtendedTip;
    } else {
        status = ExtendStatus::Reorged;
    }
    return {status, {}, report};
}

ExtendOutcome ChainStore::store_validated(const Block& block, const Hash32& hash) {
    const StoredBlock& parent = blocks_.at(block.header.previous_hash);
    std::uint64_t last_seal =
        last_seal_timestamp(parent.hash, block.header.sealer_ivtp_id);

    LedgerState ledger_after;
    RewardReport rewards;
    ValidationVerdict verdict =
        validate_block(block, parent.block.header, parent.ledger_after, registry_, last_seal,
                       params_, &ledger_after, &rewards);
    if (!verdict.ok()) {
        return {ExtendStatus::Invalid, verdict, {false, tip_, tip_, {}, {}}};
    }

    children_[block.header.previous_hash].push_back(hash);
    blocks_.emplace(hash, StoredBlock{block, hash, std::move(ledger_after), std::move(rewards)});
    return {ExtendStatus::SideBranch, verdict, {}};
}

void ChainStore::attach_orphans() {
    bool progress = true;
    while (progress) {
        progress = false;
        for (auto it = orphans_.begin(); it != orphans_.end();) {
            if (blocks_.contains(it->header.previous_hash)) {
                Block orphan = std::move(*it);
                it = orphans_.erase(it);
                Hash32 h = orphan.hash();
                if (!blocks_.contains(h)) store_validated(orphan, h); // invalid orphans drop
                progress = true;
            } else {
                ++it;
            }
        }
    }
}

} // namespace ivbc
