#include "ivbc/ivbc.h"

#include "ivbc/cloud/audit.hpp"
#include "ivbc/cloud/query.hpp"
#include "ivbc/export.hpp"
#include "ivbc/scenario/runner.hpp"
#include "ivbc/sim/config.hpp"

#include <cstring>
#include <string>

#if defined(__GNUC__)
#define IVBC_EXPORT __attribute__((visibility("default")))
#else
#define IVBC_EXPORT
#endif

using namespace ivbc;

struct ivbc_run {
    cloud::RunArchive archive;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) return nullptr;
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

ivbc_status fail(ivbc_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

ivbc_status set_output(char** out, const std::string& value) {
    char* s = dup_string(value);
    if (s == nullptr) return fail(IVBC_ERR_INTERNAL, "out of memory");
    *out = s;
    g_last_error.clear();
    return IVBC_OK;
}

/// Runs fn, translating the library's exceptions onto status codes.
template <typename Fn>
ivbc_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const cloud::AccessDenied& e) {
        return fail(IVBC_ERR_ACCESS_DENIED, e.what());
    } catch (const cloud::UnknownVehicleError& e) {
        return fail(IVBC_ERR_NOT_FOUND, e.what());
    } catch (const scenario::ScenarioInvalid& e) {
        return fail(IVBC_ERR_SCENARIO, e.what());
    } catch (const sim::ConfigError& e) {
        return fail(IVBC_ERR_SCENARIO, e.what());
    } catch (const cloud::StorageError& e) {
        return fail(IVBC_ERR_IO, e.what());
    } catch (const cloud::ArchiveError& e) {
        return fail(IVBC_ERR_IO, e.what());
    } catch (const DecodeError& e) {
        return fail(IVBC_ERR_IO, e.what());
    } catch (const std::exception& e) {
        return fail(IVBC_ERR_INTERNAL, e.what());
    }
}

} // namespace

extern "C" {

IVBC_EXPORT const char* ivbc_version(void) {
    return "0.1.0";
}

IVBC_EXPORT const char* ivbc_status_name(ivbc_status status) {
    switch (status) {
    case IVBC_OK: return "ok";
    case IVBC_ERR_USAGE: return "usage";
    case IVBC_ERR_IO: return "io";
    case IVBC_ERR_SCENARIO: return "scenario";
    case IVBC_ERR_AUDIT: return "audit";
    case IVBC_ERR_ACCESS_DENIED: return "access_denied";
    case IVBC_ERR_NOT_FOUND: return "not_found";
    case IVBC_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

IVBC_EXPORT const char* ivbc_last_error(void) {
    return g_last_error.c_str();
}

IVBC_EXPORT void ivbc_string_free(char* s) {
    std::free(s);
}

IVBC_EXPORT ivbc_status ivbc_scenario_list(char** out_json) {
    if (out_json == nullptr) return fail(IVBC_ERR_USAGE, "out_json is null");
    return guarded([&] {
        OrderedJson names = OrderedJson::array();
        for (const std::string& n : scenario::builtin_scenario_names()) names.push_back(n);
        return set_output(out_json, names.dump());
    });
}

IVBC_EXPORT ivbc_status ivbc_scenario_run(const char* scenario_name, const char* config_path,
                                          int has_seed, uint64_t seed, const char* out_dir,
                                          char** out_summary_json) {
    if (scenario_name == nullptr || out_dir == nullptr || out_summary_json == nullptr)
        return fail(IVBC_ERR_USAGE, "scenario, out_dir and out_summary_json are required");
    return guarded([&]() -> ivbc_status {
        scenario::Scenario sc = scenario::resolve_scenario(scenario_name);
        sim::SimConfig config;
        if (config_path != nullptr) config = sim::load_config_file(config_path);
        std::optional<std::uint64_t> seed_override;
        if (has_seed != 0) seed_override = seed;

        try {
            scenario::RunSummary summary =
                scenario::run_scenario(sc, config, seed_override, out_dir);
            return set_output(out_summary_json, summary.to_json().dump(2) + "\n");
        } catch (const scenario::AuditFailed& e) {
            ivbc_status rc = set_output(out_summary_json, e.summary.to_json().dump(2) + "\n");
            if (rc != IVBC_OK) return rc;
            return fail(IVBC_ERR_AUDIT, e.what());
        }
    });
}

IVBC_EXPORT ivbc_status ivbc_run_open(const char* run_dir, ivbc_run** out_run) {
    if (run_dir == nullptr || out_run == nullptr)
        return fail(IVBC_ERR_USAGE, "run_dir and out_run are required");
    return guarded([&]() -> ivbc_status {
        auto run = new ivbc_run{cloud::RunArchive::load(run_dir)};
        *out_run = run;
        g_last_error.clear();
        return IVBC_OK;
    });
}

IVBC_EXPORT void ivbc_run_close(ivbc_run* run) {
    delete run;
}

IVBC_EXPORT ivbc_status ivbc_run_export_chain(const ivbc_run* run, char** out_jsonl) {
    if (run == nullptr || out_jsonl == nullptr)
        return fail(IVBC_ERR_USAGE, "run and out_jsonl are required");
    return guarded([&] { return set_output(out_jsonl, chain_to_jsonl(run->archive.blocks())); });
}

IVBC_EXPORT ivbc_status ivbc_run_export_events(const ivbc_run* run, char** out_jsonl) {
    if (run == nullptr || out_jsonl == nullptr)
        return fail(IVBC_ERR_USAGE, "run and out_jsonl are required");
    return guarded([&]() -> ivbc_status {
        std::string out;
        for (const cloud::LoggedEvent& ev : run->archive.events()) {
            OrderedJson j;
            j["tick"] = ev.tick;
            j["node"] = ev.node;
            j["kind"] = ev.kind;
            j["digest"] = to_hex(ev.digest);
            j["detail"] = ev.detail;
            out += j.dump();
            out += '\n';
        }
        return set_output(out_jsonl, out);
    });
}

IVBC_EXPORT ivbc_status ivbc_run_export_ledger(const ivbc_run* run, char** out_json) {
    if (run == nullptr || out_json == nullptr)
        return fail(IVBC_ERR_USAGE, "run and out_json are required");
    return guarded([&] {
        return set_output(out_json,
                          ledger_to_json(run->archive.replay_ledger()).dump(2) + "\n");
    });
}

namespace {

ivbc_status parse_role_and_vehicle(const char* role, const char* vehicle_hex,
                                   cloud::AccessRole& role_out, Hash32& vehicle_out) {
    if (role == nullptr || vehicle_hex == nullptr)
        return fail(IVBC_ERR_USAGE, "role and vehicle are required");
    auto parsed = cloud::access_role_from_name(role);
    if (!parsed) return fail(IVBC_ERR_USAGE, std::string("unknown role '") + role + "'");
    if (!hash_from_hex(vehicle_hex, vehicle_out))
        return fail(IVBC_ERR_USAGE, "vehicle must be a 64-char hex id");
    role_out = *parsed;
    return IVBC_OK;
}

} // namespace

IVBC_EXPORT ivbc_status ivbc_run_query(const ivbc_run* run, const char* role,
                                       const char* vehicle_hex, int64_t from_tick,
                                       int64_t to_tick, char** out_jsonl) {
    if (run == nullptr || out_jsonl == nullptr)
        return fail(IVBC_ERR_USAGE, "run and out_jsonl are required");
    cloud::AccessRole parsed_role;
    Hash32 vehicle;
    ivbc_status rc = parse_role_and_vehicle(role, vehicle_hex, parsed_role, vehicle);
    if (rc != IVBC_OK) return rc;
    return guarded([&] {
        cloud::HistoryQuery q;
        q.from_tick = from_tick < 0 ? 0 : static_cast<std::uint64_t>(from_tick);
        q.to_tick = to_tick < 0 ? UINT64_MAX : static_cast<std::uint64_t>(to_tick);
        cloud::HistoryResult result =
            cloud::query_history(run->archive, parsed_role, vehicle, q);
        return set_output(out_jsonl, result.to_jsonl());
    });
}

IVBC_EXPORT ivbc_status ivbc_run_report(const ivbc_run* run, const char* role,
                                        const char* vehicle_hex, char** out_json) {
    if (run == nullptr || out_json == nullptr)
        return fail(IVBC_ERR_USAGE, "run and out_json are required");
    cloud::AccessRole parsed_role;
    Hash32 vehicle;
    ivbc_status rc = parse_role_and_vehicle(role, vehicle_hex, parsed_role, vehicle);
    if (rc != IVBC_OK) return rc;
    return guarded([&] {
        cloud::VehicleReport report = cloud::reputation_report(run->archive, parsed_role, vehicle);
        return set_output(out_json, report.to_json().dump(2) + "\n");
    });
}

namespace {

ivbc_status audit_to_output(const std::filesystem::path& dir, char** out_json) {
    cloud::AuditReport report = cloud::audit_run(dir);
    ivbc_status rc = set_output(out_json, report.to_json().dump(2) + "\n");
    if (rc != IVBC_OK) return rc;
    if (!report.ok()) {
        std::string first =
            report.findings.front().check + ": " + report.findings.front().detail;
        return fail(IVBC_ERR_AUDIT, first);
    }
    return IVBC_OK;
}

} // namespace

IVBC_EXPORT ivbc_status ivbc_run_audit(const ivbc_run* run, char** out_json) {
    if (run == nullptr || out_json == nullptr)
        return fail(IVBC_ERR_USAGE, "run and out_json are required");
    return guarded([&] { return audit_to_output(run->archive.dir(), out_json); });
}

IVBC_EXPORT ivbc_status ivbc_audit_dir(const char* run_dir, char** out_json) {
    if (run_dir == nullptr || out_json == nullptr)
        return fail(IVBC_ERR_USAGE, "run_dir and out_json are required");
    return guarded([&] { return audit_to_output(run_dir, out_json); });
}

} // extern "C"
