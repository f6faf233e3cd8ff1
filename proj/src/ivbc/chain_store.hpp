#pragma once

#include "ivbc/block.hpp"
#include "ivbc/ledger.hpp"

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ivbc {

enum class BlockRule : std::uint8_t {
    Ok,
    Linkage,
    Height,
    DifficultyTarget,
    NoTransactions,
    MerkleRootMismatch,
    TimestampOrder,
    Pod,
    Transaction,
};

const char* block_rule_name(BlockRule r);

/// Outcome of validate_block: Ok, or the first failed rule in checking
/// order (linkage, height, difficulty target, body, merkle root,
/// timestamp, PoD, transactions).
struct ValidationVerdict {
    BlockRule rule = BlockRule::Ok;
    std::optional<PodError> pod_error;
    std::optional<TxFailure> tx_failure;

    bool ok() const { return rule == BlockRule::Ok; }
    std::string describe() const;
};

/// Validates block against its parent and the ledger at the parent.
/// On success, out_ledger/out_rewards (when non-null) receive the
/// post-block state.
ValidationVerdict validate_block(const Block& block, const BlockHeader& parent,
                                 const LedgerState& parent_ledger,
                                 const IdentityRegistry& registry,
                                 std::uint64_t sealer_last_seal_tick, const ChainParams& params,
                                 LedgerState* out_ledger = nullptr,
                                 RewardReport* out_rewards = nullptr);

enum class ExtendStatus : std::uint8_t {
    ExtendedTip, // block advanced the current tip
    SideBranch,  // stored, tip unchanged
    Reorged,     // stored and the best chain switched branches
    Orphaned,    // parent unknown, buffered
    Duplicate,
    Invalid,
};

const char* extend_status_name(ExtendStatus s);

/// What extend did to the selected chain head.
struct TipReport {
    bool tip_changed = false;
    Hash32 old_tip{};
    Hash32 new_tip{};
    std::vector<Hash32> rolled_back; // old-tip-first, down to the fork point
    std::vector<Hash32> applied;     // fork point child first, up to the new tip
};

struct ExtendOutcome {
    ExtendStatus status;
    ValidationVerdict verdict; // populated when status == Invalid
    TipReport report;
};

/// One node's copy of the distributed open ledger: every validated block,
/// a per-block ledger snapshot, and the longest-chain fork choice with
/// the lexicographically smaller tip hash breaking ties. Single writer;
/// all mutation goes through extend.
class ChainStore {
public:
    struct StoredBlock {
        Block block;
        Hash32 hash;
        LedgerState ledger_after;
        RewardReport rewards;
    };

    ChainStore(IdentityRegistry registry, LedgerState genesis_ledger, ChainParams params);

    ExtendOutcome extend(const Block& block);

    const Hash32& tip() const { return tip_; }
    std::uint64_t tip_height() const;
    const LedgerState& tip_ledger() const;

    const StoredBlock* find(const Hash32& hash) const;
    bool contains(const Hash32& hash) const { return blocks_.contains(hash); }
    std::size_t block_count() const { return blocks_.size(); }
    std::size_t orphan_count() const { return orphans_.size(); }

    /// Head of the longest valid chain over the stored set; ties break to
    /// the smaller hash. Pure function of the block set.
    Hash32 select_fork() const;

    /// Timestamp of the newest block at or below `from` sealed by the
    /// vehicle; 0 when it never sealed on that branch.
    std::uint64_t last_seal_timestamp(const Hash32& from, const Hash32& vehicle) const;

    /// Blocks from genesis up to the given head (defaults to the tip).
    std::vector<const StoredBlock*> chain_to(const Hash32& head) const;
    std::vector<const StoredBlock*> main_chain() const { return chain_to(tip_); }

    /// The block with the given hash plus up to count-1 of its ancestors,
    /// oldest first. Used to answer catch-up requests.
    std::vector<const StoredBlock*> ancestors(const Hash32& from, std::size_t count) const;

    const IdentityRegistry& registry() const { return registry_; }
    const ChainParams& params() const { return params_; }

    static constexpr std::size_t kOrphanBufferCap = 64;

private:
    ExtendOutcome store_validated(const Block& block, const Hash32& hash);
    void attach_orphans();
    TipReport reselect_tip();
    std::vector<Hash32> path_down_to(const Hash32& from, const Hash32& ancestor) const;
    const Hash32& fork_point(const Hash32& a, const Hash32& b) const;

    IdentityRegistry registry_;
    ChainParams params_;
    std::map<Hash32, StoredBlock> blocks_;
    std::map<Hash32, std::vector<Hash32>> children_;
    std::deque<Block> orphans_; // FIFO, capped at kOrphanBufferCap
    Hash32 tip_{};
};

} // namespace ivbc
