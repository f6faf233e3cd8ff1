// Command-line front end. Talks to the ivbc shared library exclusively
// through its C interface.

#include <ivbc/ivbc.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct OwnedString {
    char* value = nullptr;
    ~OwnedString() { ivbc_string_free(value); }
    std::string str() const { return value == nullptr ? std::string() : std::string(value); }
};

int report_error(ivbc_status status) {
    std::cerr << "error (" << ivbc_status_name(status) << "): " << ivbc_last_error() << "\n";
    return status == IVBC_ERR_USAGE ? kExitUsage : kExitFailure;
}

void print_summary_table(const std::string& summary_json) {
    auto j = nlohmann::json::parse(summary_json);
    std::cout << "scenario          " << j.value("scenario", "") << " (seed " << j.value("seed", 0ull)
              << ")\n";
    std::cout << "final tip         " << j.value("tip", "") << "\n";
    std::cout << "chain length      " << j.value("chain_length", 0ull) << "\n";
    std::cout << "leader            " << j.value("leader", "") << "\n";
    std::cout << "messages          " << j.value("messages_accepted", 0ull) << " accepted / "
              << j.value("messages_rejected", 0ull) << " rejected\n";
    std::cout << "supply            " << j.value("supply", 0ull) << "\n";
    if (j.contains("balances")) {
        std::cout << "balances\n";
        for (auto& [id, bal] : j["balances"].items())
            std::cout << "  " << id.substr(0, 16) << "..  " << bal.get<std::uint64_t>() << "\n";
    }
    if (j.contains("invariants")) {
        std::cout << "invariants\n";
        for (auto& inv : j["invariants"]) {
            std::cout << "  " << (inv.value("ok", false) ? "ok  " : "FAIL") << "  "
                      << inv.value("name", "");
            std::string detail = inv.value("detail", "");
            if (!detail.empty()) std::cout << "  (" << detail << ")";
            std::cout << "\n";
        }
    }
    std::cout << (j.value("ok", false) ? "RUN OK" : "RUN FAILED") << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"blockchain-backed intelligent-vehicle data sharing simulator"};
    app.require_subcommand(1);

    // run
    std::string scenario, config_path, out_dir, retention = "keep";
    std::uint64_t seed = 0;
    bool has_seed = false;
    auto* run_cmd = app.add_subcommand("run", "execute a scenario and persist the run");
    run_cmd->add_option("--scenario", scenario, "builtin name or scenario file")->required();
    run_cmd->add_option("--config", config_path, "configuration file (key = value lines)");
    run_cmd->add_option("--seed", seed, "override the run seed")->each([&](const std::string&) {
        has_seed = true;
    });
    run_cmd->add_option("--out", out_dir, "output run directory")->required();
    run_cmd->add_option("--retention", retention, "keep the run directory or purge it at exit")
        ->check(CLI::IsMember({"keep", "purge-at-exit"}));

    // export
    std::string export_run_dir, export_format = "json", export_what = "chain";
    auto* export_cmd = app.add_subcommand("export", "dump run records as JSON");
    export_cmd->add_option("--run", export_run_dir, "run directory")->required();
    export_cmd->add_option("--format", export_format, "output format (json)")
        ->check(CLI::IsMember({"json"}));
    export_cmd->add_option("--what", export_what, "chain | events | ledger")
        ->check(CLI::IsMember({"chain", "events", "ledger"}));

    // query
    std::string query_run_dir, query_role, query_vehicle;
    std::int64_t from_tick = 0, to_tick = -1;
    auto* query_cmd = app.add_subcommand("query", "role-gated history of one vehicle");
    query_cmd->add_option("--run", query_run_dir, "run directory")->required();
    query_cmd->add_option("--role", query_role, "owner|hospital|insurance|police|public")
        ->required();
    query_cmd->add_option("--vehicle", query_vehicle, "hex IV-TP id")->required();
    query_cmd->add_option("--from", from_tick, "start tick (inclusive)");
    query_cmd->add_option("--to", to_tick, "end tick (inclusive, -1 = open)");

    // report
    std::string report_run_dir, report_role, report_vehicle;
    auto* report_cmd = app.add_subcommand("report", "reputation report of one vehicle");
    report_cmd->add_option("--run", report_run_dir, "run directory")->required();
    report_cmd->add_option("--role", report_role, "owner|hospital|insurance|police|public")
        ->required();
    report_cmd->add_option("--vehicle", report_vehicle, "hex IV-TP id")->required();

    // audit
    std::string audit_run_dir;
    auto* audit_cmd = app.add_subcommand("audit", "re-validate a stored run");
    audit_cmd->add_option("--run", audit_run_dir, "run directory")->required();

    // scenarios
    auto* list_cmd = app.add_subcommand("scenarios", "list builtin scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    if (run_cmd->parsed()) {
        OwnedString summary;
        ivbc_status rc =
            ivbc_scenario_run(scenario.c_str(), config_path.empty() ? nullptr : config_path.c_str(),
                              has_seed ? 1 : 0, seed, out_dir.c_str(), &summary.value);
        if (rc != IVBC_OK && summary.value == nullptr) return report_error(rc);
        print_summary_table(summary.str());
        if (retention == "purge-at-exit") std::filesystem::remove_all(out_dir);
        if (rc == IVBC_ERR_AUDIT) {
            std::cerr << "error (audit): " << ivbc_last_error() << "\n";
            return kExitFailure;
        }
        return rc == IVBC_OK ? kExitOk : report_error(rc);
    }

    if (export_cmd->parsed()) {
        ivbc_run* run = nullptr;
        ivbc_status rc = ivbc_run_open(export_run_dir.c_str(), &run);
        if (rc != IVBC_OK) return report_error(rc);
        OwnedString out;
        if (export_what == "chain") rc = ivbc_run_export_chain(run, &out.value);
        else if (export_what == "events") rc = ivbc_run_export_events(run, &out.value);
        else rc = ivbc_run_export_ledger(run, &out.value);
        ivbc_run_close(run);
        if (rc != IVBC_OK) return report_error(rc);
        std::cout << out.str();
        return kExitOk;
    }

    if (query_cmd->parsed()) {
        ivbc_run* run = nullptr;
        ivbc_status rc = ivbc_run_open(query_run_dir.c_str(), &run);
        if (rc != IVBC_OK) return report_error(rc);
        OwnedString out;
        rc = ivbc_run_query(run, query_role.c_str(), query_vehicle.c_str(), from_tick, to_tick,
                            &out.value);
        ivbc_run_close(run);
        if (rc != IVBC_OK) return report_error(rc);
        std::cout << out.str();
        return kExitOk;
    }

    if (report_cmd->parsed()) {
        ivbc_run* run = nullptr;
        ivbc_status rc = ivbc_run_open(report_run_dir.c_str(), &run);
        if (rc != IVBC_OK) return report_error(rc);
        OwnedString out;
        rc = ivbc_run_report(run, report_role.c_str(), report_vehicle.c_str(), &out.value);
        ivbc_run_close(run);
        if (rc != IVBC_OK) return report_error(rc);
        std::cout << out.str();
        return kExitOk;
    }

    if (audit_cmd->parsed()) {
        OwnedString out;
        ivbc_status rc = ivbc_audit_dir(audit_run_dir.c_str(), &out.value);
        if (out.value != nullptr) std::cout << out.str();
        if (rc == IVBC_OK) return kExitOk;
        std::cerr << "error (" << ivbc_status_name(rc) << "): " << ivbc_last_error() << "\n";
        return kExitFailure;
    }

    if (list_cmd->parsed()) {
        OwnedString out;
        ivbc_status rc = ivbc_scenario_list(&out.value);
        if (rc != IVBC_OK) return report_error(rc);
        for (auto& name : nlohmann::json::parse(out.str())) std::cout << name.get<std::string>() << "\n";
        return kExitOk;
    }

    return kExitUsage;
}
