#include "ivbc/cloud/audit.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace ivbc::cloud {

namespace {

std::string read_text_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void check_chain(const RunArchive& archive, AuditReport& report) {
    const auto& blocks = archive.blocks();
    if (blocks.empty()) {
        report.findings.push_back({"chain", "blocks.log holds no blocks"});
        return;
    }
    if (!(blocks.front() == genesis_block())) {
        report.findings.push_back({"chain", "block 0 is not the shared genesis"});
        return;
    }

    ChainParams params = archive.config().chain_params();
    LedgerState ledger = archive.provision_ledger();
    std::map<Hash32, std::uint64_t> last_seal;

    for (std::size_t i = 1; i < blocks.size(); ++i) {
        const Block& b = blocks[i];
        const Block& parent = blocks[i - 1];
        std::uint64_t seal_tick = 0;
        auto it = last_seal.find(b.header.sealer_ivtp_id);
        if (it != last_seal.end()) seal_tick = it->second;

        LedgerState next;
        ValidationVerdict verdict = validate_block(b, parent.header, ledger, archive.registry(),
                                                   seal_tick, params, &next);
        if (!verdict.ok()) {
            report.findings.push_back(
                {"chain", "block " + std::to_string(b.header.height) + " (" + to_hex(b.hash()) +
                              ") fails validation: " + verdict.describe()});
            return;
        }
        ledger = std::move(next);
        last_seal[b.header.sealer_ivtp_id] = b.header.timestamp_ms;

        std::uint64_t expected_supply = 0;
        for (const ProvisionEntry& e : archive.provision()) expected_supply += e.initial_balance;
        if (ledger.supply() != expected_supply) {
            report.findings.push_back(
                {"supply", "supply drifted at height " + std::to_string(b.header.height)});
            return;
        }
    }
}

void check_snapshot(const RunArchive& archive, AuditReport& report) {
    if (!archive.final_snapshot()) {
        report.findings.push_back({"snapshot", "snapshots.log has no final ledger snapshot"});
        return;
    }
    LedgerState rebuilt = archive.replay_ledger();
    if (!(rebuilt == *archive.final_snapshot()))
        report.findings.push_back(
            {"snapshot", "final snapshot differs from a genesis replay of the chain"});
}

void check_summary(const RunArchive& archive, AuditReport& report) {
    std::filesystem::path p = archive.dir() / "summary.json";
    if (!std::filesystem::exists(p)) return; // audited mid-run, before the summary lands
    OrderedJson j = OrderedJson::parse(read_text_file(p));

    if (archive.blocks().empty()) return;
    const Block& tip = archive.blocks().back();
    if (j.value("tip", "") != to_hex(tip.hash()))
        report.findings.push_back({"summary", "recorded tip differs from the stored chain head"});
    if (j.value("chain_length", std::uint64_t{0}) != archive.blocks().size())
        report.findings.push_back({"summary", "recorded chain length is wrong"});
    if (j.contains("leader")) {
        LedgerState ledger = archive.replay_ledger();
        if (j["leader"].get<std::string>() != to_hex(ledger.leader()))
            report.findings.push_back({"summary", "recorded leader is not the balance argmax"});
    }
}

void check_benefiter_accepts(const RunArchive& archive, AuditReport& report) {
    if (archive.events().empty() || archive.run_nodes().empty()) return;

    // benefiter id -> digests that node accepted
    std::map<std::uint32_t, Hash32> node_ids;
    for (const RunNodeInfo& n : archive.run_nodes()) node_ids[n.index] = n.ivtp_id;
    std::map<Hash32, std::set<Hash32>> accepted_by;
    for (const LoggedEvent& ev : archive.events()) {
        if (ev.kind != "msg_accepted") continue;
        auto it = node_ids.find(ev.node);
        if (it != node_ids.end()) accepted_by[it->second].insert(ev.digest);
    }

    for (const Block& b : archive.blocks()) {
        if (b.header.height == 0) continue;
        for (const Transaction& tx : b.transactions) {
            if (tx.kind != TxKind::DataShare) continue;
            for (const Hash32& benefiter : tx.data_share.benefiters) {
                auto it = accepted_by.find(benefiter);
                if (it == accepted_by.end() ||
                    !it->second.contains(tx.data_share.message_digest)) {
                    report.findings.push_back(
                        {"benefiters", "benefiter " + to_hex(benefiter) +
                                           " lacks an accept verdict for message " +
                                           to_hex(tx.data_share.message_digest)});
                    return;
                }
            }
        }
    }
}

void check_index(const RunArchive& archive, AuditReport& report) {
    for (const ProvisionEntry& e : archive.provision()) {
        HistoryQuery indexed;
        HistoryQuery scanned;
        scanned.use_index = false;
        indexed.scopes = scanned.scopes = all_record_scopes();
        // Police scope covers everything; the audit compares paths, not roles.
        HistoryResult a = query_history(archive, AccessRole::Police, e.ivtp_id, indexed);
        HistoryResult b = query_history(archive, AccessRole::Police, e.ivtp_id, scanned);
        if (!history_equal(a, b)) {
            report.findings.push_back(
                {"index", "indexed history of " + to_hex(e.ivtp_id) + " differs from a scan"});
            return;
        }
    }
}

} // namespace

OrderedJson AuditReport::to_json() const {
    OrderedJson j;
    j["ok"] = ok();
    OrderedJson checks = OrderedJson::array();
    for (const std::string& c : checks_run) checks.push_back(c);
    j["checks"] = std::move(checks);
    OrderedJson f = OrderedJson::array();
    for (const AuditFinding& finding : findings) {
        OrderedJson one;
        one["check"] = finding.check;
        one["detail"] = finding.detail;
        f.push_back(std::move(one));
    }
    j["findings"] = std::move(f);
    return j;
}

AuditReport audit_run(const std::filesystem::path& dir) {
    AuditReport report;
    report.checks_run = {"chain", "supply", "snapshot", "summary", "benefiters", "index"};
    try {
        RunArchive archive = RunArchive::load(dir);
        check_chain(archive, report);
        check_snapshot(archive, report);
        check_summary(archive, report);
        check_benefiter_accepts(archive, report);
        check_index(archive, report);
    } catch (const std::exception& e) {
        report.findings.push_back({"archive", e.what()});
    }
    return report;
}

} // namespace ivbc::cloud
