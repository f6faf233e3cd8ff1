#pragma once

#include "ivbc/cloud/query.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ivbc::cloud {

struct AuditFinding {
    std::string check;
    std::string detail;
};

struct AuditReport {
    std::vector<std::string> checks_run;
    std::vector<AuditFinding> findings;

    bool ok() const { return findings.empty(); }
    OrderedJson to_json() const;
};

/// Re-validates everything a run directory claims: every stored block
/// under the full chain rules, supply conservation at every height, the
/// snapshot against a genesis replay, the recorded tip and leader, the
/// benefiter/accept correspondence and the index/scan equivalence. Pure:
/// never writes to the run directory.
AuditReport audit_run(const std::filesystem::path& dir);

} // namespace ivbc::cloud
