#pragma once

#include "ivbc/block.hpp"
#include "ivbc/bytes.hpp"
#include "ivbc/identity.hpp"
#include "ivbc/ledger.hpp"
#include "ivbc/sim/message.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ivbc::cloud {

enum class RecordKind : std::uint8_t {
    Block = 1,
    Message = 2,
    Snapshot = 3,
    Provision = 4,
};

const char* record_kind_name(RecordKind k);

struct StorageError : std::runtime_error {
    explicit StorageError(const std::string& what) : std::runtime_error(what) {}
};

struct Record {
    std::uint64_t id = 0;
    RecordKind kind = RecordKind::Block;
    Bytes body;
};

/// One vehicle provisioned at genesis: identity material plus the opening
/// balance.
struct ProvisionEntry {
    Hash32 ivtp_id{};
    Bytes public_key;
    std::string label;
    std::uint64_t initial_balance = 0;
};

Bytes encode_provision(const std::vector<ProvisionEntry>& entries);
std::vector<ProvisionEntry> decode_provision(std::span<const std::uint8_t> data);

/// Append-only record store of one run: blocks.log, messages.log and
/// snapshots.log under a run directory, each a magic-tagged sequence of
/// length-prefixed records. Records are never mutated or deleted; ids
/// increase monotonically across the whole store.
class CloudStore {
public:
    /// Creates a fresh run directory (must not already contain logs).
    static CloudStore create(const std::filesystem::path& dir);

    /// Re-opens an existing run directory, rebuilding the id index by
    /// scanning the logs.
    static CloudStore open(const std::filesystem::path& dir);

    std::uint64_t append(RecordKind kind, std::span<const std::uint8_t> body);

    std::uint64_t append_block(const Block& block) {
        return append(RecordKind::Block, block.encode());
    }
    std::uint64_t append_message(const sim::SafetyMessage& msg) {
        return append(RecordKind::Message, msg.encode());
    }
    std::uint64_t append_snapshot(const LedgerState& ledger) {
        return append(RecordKind::Snapshot, ledger.encode());
    }
    std::uint64_t append_provision(const std::vector<ProvisionEntry>& entries) {
        return append(RecordKind::Provision, encode_provision(entries));
    }

    std::optional<Record> fetch(std::uint64_t id) const;
    std::vector<Record> records(RecordKind kind) const;
    std::size_t record_count() const { return index_.size(); }

    const std::filesystem::path& dir() const { return dir_; }

    static std::filesystem::path log_path(const std::filesystem::path& dir, RecordKind kind);

private:
    struct Location {
        RecordKind kind;
        std::uint64_t offset; // frame start within its log file
    };

    CloudStore(std::filesystem::path dir) : dir_(std::move(dir)) {}
    void scan_log(RecordKind kind);

    std::filesystem::path dir_;
    std::map<std::uint64_t, Location> index_;
    std::uint64_t next_id_ = 1;
};

} // namespace ivbc::cloud
