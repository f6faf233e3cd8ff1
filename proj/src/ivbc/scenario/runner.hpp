#pragma once

#include "ivbc/cloud/audit.hpp"
#include "ivbc/scenario/scenario.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ivbc::scenario {

struct InvariantResult {
    std::string name;
    bool ok = false;
    std::string detail;
};

struct RunSummary {
    std::string scenario;
    std::uint64_t seed = 0;
    Hash32 tip{};
    std::uint64_t chain_length = 0;
    std::map<std::string, std::uint64_t> balances; // hex ivtp_id -> balance
    std::uint64_t supply = 0;
    std::string leader; // hex ivtp_id of the max-balance vehicle
    std::uint64_t messages_accepted = 0;
    std::uint64_t messages_rejected = 0;
    std::vector<InvariantResult> invariants;
    bool ok = false;

    OrderedJson to_json() const;
    std::string to_table() const;
};

struct AuditFailed : std::runtime_error {
    explicit AuditFailed(const RunSummary& summary);
    RunSummary summary;
};

/// Executes the scenario to completion, persists every record under
/// out_dir (blocks.log, messages.log, snapshots.log, index/, events.jsonl,
/// chain.jsonl, ledger.json, run.json, summary.json) and runs the full
/// invariant audit. Throws AuditFailed (carrying the written summary)
/// when any invariant is violated.
RunSummary run_scenario(const Scenario& scenario, const sim::SimConfig& base_config,
                        std::optional<std::uint64_t> seed_override,
                        const std::filesystem::path& out_dir);

} // namespace ivbc::scenario
