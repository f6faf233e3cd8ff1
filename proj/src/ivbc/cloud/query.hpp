#pragma once

#include "ivbc/cloud/access.hpp"
#include "ivbc/cloud/store.hpp"
#include "ivbc/export.hpp"
#include "ivbc/sim/config.hpp"
#include "ivbc/sim/event_log.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ivbc::cloud {

struct UnknownVehicleError : std::runtime_error {
    explicit UnknownVehicleError(const std::string& hex)
        : std::runtime_error("vehicle not provisioned in this run: " + hex) {}
};

struct ArchiveError : std::runtime_error {
    explicit ArchiveError(const std::string& what) : std::runtime_error(what) {}
};

/// Replayed event line from events.jsonl.
struct LoggedEvent {
    std::uint64_t tick = 0;
    std::uint32_t node = 0;
    std::string kind;
    Hash32 digest{};
    std::string detail;
};

struct RunNodeInfo {
    std::uint32_t index = 0;
    std::string label;
    Hash32 ivtp_id{};
    bool registered = false;
    bool is_rsu = false;
    std::string adversary;
};

/// A run directory loaded for querying: decoded logs, run metadata and
/// the provisioning registry. Read-only.
class RunArchive {
public:
    static RunArchive load(const std::filesystem::path& dir);

    const std::filesystem::path& dir() const { return dir_; }
    const CloudStore& store() const { return store_; }
    const sim::SimConfig& config() const { return config_; }
    const std::string& scenario_name() const { return scenario_name_; }

    const std::vector<ProvisionEntry>& provision() const { return provision_; }
    const IdentityRegistry& registry() const { return registry_; }
    bool is_provisioned(const Hash32& vehicle) const;

    const std::vector<Block>& blocks() const { return blocks_; }
    const std::vector<std::uint64_t>& block_record_ids() const { return block_record_ids_; }
    const std::vector<sim::SafetyMessage>& messages() const { return messages_; }
    const std::vector<std::uint64_t>& message_record_ids() const { return message_record_ids_; }
    const std::optional<LedgerState>& final_snapshot() const { return final_snapshot_; }
    const std::vector<LoggedEvent>& events() const { return events_; }
    const std::vector<RunNodeInfo>& run_nodes() const { return run_nodes_; }

    /// Ledger obtained by folding the stored chain from provisioning.
    LedgerState replay_ledger(std::optional<std::uint64_t> up_to_height = std::nullopt) const;

    /// Genesis provisioning as a ledger (before any block).
    LedgerState provision_ledger() const;

    const sim::SafetyMessage* message_by_digest(const Hash32& digest) const;

private:
    std::filesystem::path dir_;
    CloudStore store_;
    sim::SimConfig config_;
    std::string scenario_name_;
    std::vector<ProvisionEntry> provision_;
    IdentityRegistry registry_;
    std::vector<Block> blocks_;
    std::vector<std::uint64_t> block_record_ids_;
    std::vector<sim::SafetyMessage> messages_;
    std::vector<std::uint64_t> message_record_ids_;
    std::map<Hash32, std::size_t> message_index_;
    std::optional<LedgerState> final_snapshot_;
    std::vector<LoggedEvent> events_;
    std::vector<RunNodeInfo> run_nodes_;

    RunArchive(std::filesystem::path dir, CloudStore store)
        : dir_(std::move(dir)), store_(std::move(store)) {}
};

struct HistoryQuery {
    std::uint64_t from_tick = 0;
    std::uint64_t to_tick = UINT64_MAX;
    std::vector<RecordScope> scopes = {RecordScope::Transactions, RecordScope::Messages};
    bool use_index = true; // false forces the linear scan path
};

/// Query results: on-chain entries ordered by (height, intra-block
/// index), messages by tick.
struct HistoryResult {
    struct HeaderEntry {
        std::uint64_t height = 0;
        std::uint64_t record_id = 0;
        BlockHeader header;
    };
    struct TxEntry {
        std::uint64_t height = 0;
        std::uint64_t tx_index = 0;
        std::uint64_t block_timestamp = 0;
        std::uint64_t record_id = 0;
        Transaction tx;
    };
    struct MsgEntry {
        std::uint64_t tick = 0;
        std::uint64_t record_id = 0;
        sim::SafetyMessage msg;
    };

    std::vector<HeaderEntry> headers;
    std::vector<TxEntry> transactions;
    std::vector<MsgEntry> messages;

    std::string to_jsonl() const;
};

bool history_equal(const HistoryResult& a, const HistoryResult& b);

/// Role-gated history of one vehicle. Throws AccessDenied when the role
/// lacks any requested scope, UnknownVehicleError for strangers.
HistoryResult query_history(const RunArchive& archive, AccessRole role, const Hash32& vehicle,
                            const HistoryQuery& query = {});

struct VehicleReport {
    Hash32 vehicle{};
    std::string label;
    std::uint64_t balance = 0;
    std::uint64_t blocks_sealed = 0;
    std::uint64_t messages_shared = 0;
    std::uint64_t messages_benefited = 0;
    std::uint64_t rejected_messages = 0;

    OrderedJson to_json() const;
};

/// Reputation counters recomputed from the stored records (never cached).
VehicleReport reputation_report(const RunArchive& archive, AccessRole role,
                                const Hash32& vehicle);

/// Writes index/<vehicle-hex>.jsonl posting lists for every provisioned
/// vehicle.
void build_index(const RunArchive& archive);

} // namespace ivbc::cloud
