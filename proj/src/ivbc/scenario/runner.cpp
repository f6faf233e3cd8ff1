#include "ivbc/scenario/runner.hpp"

#include "ivbc/export.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace ivbc::scenario {

namespace {

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw cloud::StorageError("cannot write " + p.string());
    out << content;
}

OrderedJson config_to_json(const sim::SimConfig& c) {
    OrderedJson j;
    j["node_count"] = c.node_count;
    j["seed"] = c.seed;
    j["latency_min_ticks"] = c.latency_min_ticks;
    j["latency_max_ticks"] = c.latency_max_ticks;
    j["drop_probability"] = c.drop_probability;
    j["radio_range_m"] = c.radio_range_m;
    j["base_difficulty"] = c.base_difficulty;
    j["unit_m"] = c.unit_m;
    j["reward_amount"] = c.reward_amount;
    j["initial_balance"] = c.initial_balance;
    j["duration_ticks"] = c.duration_ticks;
    return j;
}

} // namespace

OrderedJson RunSummary::to_json() const {
    OrderedJson j;
    j["scenario"] = scenario;
    j["seed"] = seed;
    j["tip"] = to_hex(tip);
    j["chain_length"] = chain_length;
    OrderedJson bal = OrderedJson::object();
    for (const auto& [id, b] : balances) bal[id] = b;
    j["balances"] = std::move(bal);
    j["supply"] = supply;
    j["leader"] = leader;
    j["messages_accepted"] = messages_accepted;
    j["messages_rejected"] = messages_rejected;
    OrderedJson inv = OrderedJson::array();
    for (const InvariantResult& r : invariants) {
        OrderedJson one;
        one["name"] = r.name;
        one["ok"] = r.ok;
        one["detail"] = r.detail;
        inv.push_back(std::move(one));
    }
    j["invariants"] = std::move(inv);
    j["ok"] = ok;
    return j;
}

std::string RunSummary::to_table() const {
    std::ostringstream out;
    out << "scenario          " << scenario << " (seed " << seed << ")\n";
    out << "final tip         " << to_hex(tip) << "\n";
    out << "chain length      " << chain_length << "\n";
    out << "leader            " << leader << "\n";
    out << "messages          " << messages_accepted << " accepted / " << messages_rejected
        << " rejected\n";
    out << "supply            " << supply << "\n";
    out << "balances\n";
    for (const auto& [id, b] : balances)
        out << "  " << id.substr(0, 16) << "..  " << std::setw(8) << b << "\n";
    out << "invariants\n";
    for (const InvariantResult& r : invariants)
        out << "  " << (r.ok ? "ok  " : "FAIL") << "  " << r.name
            << (r.detail.empty() ? "" : "  (" + r.detail + ")") << "\n";
    out << (ok ? "RUN OK" : "RUN FAILED") << "\n";
    return out.str();
}

AuditFailed::AuditFailed(const RunSummary& s)
    : std::runtime_error("run invariants violated in scenario '" + s.scenario + "'"),
      summary(s) {}

RunSummary run_scenario(const Scenario& scenario, const sim::SimConfig& base_config,
                        std::optional<std::uint64_t> seed_override,
                        const std::filesystem::path& out_dir) {
    sim::SimConfig config = base_config;
    config.apply(scenario.config_overrides);
    if (seed_override) config.seed = *seed_override;
    config.validate();
    scenario.validate(config);

    sim::World world(config, scenario.to_setup());
    world.run();

    // Node 0 is the reference replica; the tip-agreement invariant below
    // confirms every honest node ended on the same head.
    const sim::Node& reference = world.node(0);
    auto chain = reference.chain.main_chain();
    const LedgerState& final_ledger = reference.chain.tip_ledger();

    cloud::CloudStore store = cloud::CloudStore::create(out_dir);
    std::vector<cloud::ProvisionEntry> provision;
    for (const auto& [id, entry] : world.registry().entries())
        provision.push_back({id, entry.public_key, entry.label, config.initial_balance});
    store.append_provision(provision);
    for (const ChainStore::StoredBlock* sb : chain) store.append_block(sb->block);
    for (const sim::SafetyMessage& msg : world.message_archive()) store.append_message(msg);
    store.append_snapshot(final_ledger);

    // run.json: configuration echo plus the node roster.
    OrderedJson run_json;
    run_json["scenario"] = scenario.name;
    run_json["seed"] = config.seed;
    run_json["config"] = config_to_json(config);
    OrderedJson nodes = OrderedJson::array();
    for (std::uint32_t i = 0; i < world.node_count(); ++i) {
        const sim::Node& n = world.node(i);
        OrderedJson one;
        one["index"] = n.index;
        one["label"] = n.label;
        one["ivtp_id"] = to_hex(n.identity.ivtp_id);
        one["registered"] = n.registered;
        one["is_rsu"] = n.is_rsu;
        one["adversary"] = sim::adversary_behavior_name(n.adversary);
        nodes.push_back(std::move(one));
    }
    run_json["nodes"] = std::move(nodes);
    write_file(out_dir / "run.json", run_json.dump(2) + "\n");

    std::vector<const ChainStore::StoredBlock*> dump_chain = chain;
    write_file(out_dir / "chain.jsonl", chain_to_jsonl(dump_chain));
    write_file(out_dir / "events.jsonl", world.event_log().to_jsonl());
    write_file(out_dir / "ledger.json", ledger_to_json(final_ledger).dump(2) + "\n");

    cloud::RunArchive archive = cloud::RunArchive::load(out_dir);
    cloud::build_index(archive);

    RunSummary summary;
    summary.scenario = scenario.name;
    summary.seed = config.seed;
    summary.tip = reference.chain.tip();
    summary.chain_length = chain.size();
    for (const auto& [id, bal] : final_ledger.balances()) summary.balances[to_hex(id)] = bal;
    summary.supply = final_ledger.supply();
    summary.leader = to_hex(final_ledger.leader());
    for (const sim::Event& ev : world.event_log().events()) {
        if (ev.kind == sim::EventKind::MsgAccepted) summary.messages_accepted += 1;
        if (ev.kind == sim::EventKind::MsgRejected) summary.messages_rejected += 1;
    }

    // Invariant audit. The store audit re-reads everything just written.
    {
        InvariantResult tip_agreement{"tip_agreement", true, ""};
        for (std::uint32_t idx : world.honest_nodes()) {
            if (world.node(idx).chain.tip() != summary.tip) {
                tip_agreement.ok = false;
                tip_agreement.detail = "node " + std::to_string(idx) + " disagrees";
                break;
            }
        }
        summary.invariants.push_back(std::move(tip_agreement));

        std::uint64_t expected_supply =
            static_cast<std::uint64_t>(provision.size()) * config.initial_balance;
        summary.invariants.push_back({"supply_conservation", summary.supply == expected_supply,
                                      summary.supply == expected_supply
                                          ? ""
                                          : "supply " + std::to_string(summary.supply)});

        cloud::AuditReport audit = cloud::audit_run(out_dir);
        InvariantResult store_audit{"store_audit", audit.ok(), ""};
        if (!audit.ok()) store_audit.detail = audit.findings.front().check + ": " +
                                              audit.findings.front().detail;
        summary.invariants.push_back(std::move(store_audit));
    }
    summary.ok = true;
    for (const InvariantResult& r : summary.invariants) summary.ok = summary.ok && r.ok;

    write_file(out_dir / "summary.json", summary.to_json().dump(2) + "\n");
    if (!summary.ok) throw AuditFailed(summary);
    return summary;
}

} // namespace ivbc::scenario
