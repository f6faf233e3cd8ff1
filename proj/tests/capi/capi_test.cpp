// Exercises the shared library strictly through include/ivbc/ivbc.h.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <ivbc/ivbc.h>

#include <filesystem>
#include <fstream>
#include <string>

namespace {

struct OwnedString {
    char* value = nullptr;
    ~OwnedString() { ivbc_string_free(value); }
    std::string str() const { return value == nullptr ? std::string() : std::string(value); }
};

std::filesystem::path fresh_dir(const std::string& tag) {
    static int counter = 0;
    auto dir = std::filesystem::temp_directory_path() /
               ("ivbc-capi-" + tag + "-" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    return dir;
}

std::string first_vehicle_hex(const std::string& summary_json) {
    // balances is a map keyed by hex ids; grab the first key.
    std::size_t pos = summary_json.find("\"balances\"");
    REQUIRE(pos != std::string::npos);
    pos = summary_json.find('"', summary_json.find('{', pos) + 1);
    return summary_json.substr(pos + 1, 64);
}

} // namespace

TEST_CASE("version and status names") {
    CHECK(std::string(ivbc_version()) == "0.1.0");
    CHECK(std::string(ivbc_status_name(IVBC_OK)) == "ok");
    CHECK(std::string(ivbc_status_name(IVBC_ERR_AUDIT)) == "audit");
}

TEST_CASE("scenario list names the builtins") {
    OwnedString out;
    REQUIRE(ivbc_scenario_list(&out.value) == IVBC_OK);
    std::string json = out.str();
    CHECK(json.find("intersection") != std::string::npos);
    CHECK(json.find("convoy") != std::string::npos);
    CHECK(json.find("partition-heal") != std::string::npos);
    CHECK(json.find("adversary-mix") != std::string::npos);
}

TEST_CASE("null and bad arguments are usage errors") {
    CHECK(ivbc_scenario_list(nullptr) == IVBC_ERR_USAGE);
    OwnedString out;
    CHECK(ivbc_scenario_run(nullptr, nullptr, 0, 0, "x", &out.value) == IVBC_ERR_USAGE);
    CHECK(ivbc_run_open(nullptr, nullptr) == IVBC_ERR_USAGE);
    CHECK(std::string(ivbc_last_error()).size() > 0);
}

TEST_CASE("unknown scenarios and missing run dirs fail cleanly") {
    auto dir = fresh_dir("nope");
    OwnedString summary;
    CHECK(ivbc_scenario_run("definitely-not-a-scenario", nullptr, 0, 0, dir.string().c_str(),
                            &summary.value) == IVBC_ERR_SCENARIO);
    ivbc_run* run = nullptr;
    CHECK(ivbc_run_open((dir / "missing").string().c_str(), &run) != IVBC_OK);
}

TEST_CASE("full round trip: run, open, export, query, report, audit") {
    auto dir = fresh_dir("round");
    OwnedString summary;
    ivbc_status rc = ivbc_scenario_run("intersection", nullptr, 1, 42, dir.string().c_str(),
                                       &summary.value);
    REQUIRE(rc == IVBC_OK);
    std::string vehicle = first_vehicle_hex(summary.str());
    REQUIRE(vehicle.size() == 64);

    ivbc_run* run = nullptr;
    REQUIRE(ivbc_run_open(dir.string().c_str(), &run) == IVBC_OK);

    OwnedString chain;
    REQUIRE(ivbc_run_export_chain(run, &chain.value) == IVBC_OK);
    CHECK(chain.str().find("\"height\":0") != std::string::npos);

    OwnedString events;
    REQUIRE(ivbc_run_export_events(run, &events.value) == IVBC_OK);
    CHECK(events.str().find("msg_accepted") != std::string::npos);

    OwnedString ledger;
    REQUIRE(ivbc_run_export_ledger(run, &ledger.value) == IVBC_OK);
    CHECK(ledger.str().find("\"supply\"") != std::string::npos);

    OwnedString history;
    REQUIRE(ivbc_run_query(run, "police", vehicle.c_str(), 0, -1, &history.value) == IVBC_OK);

    OwnedString denied;
    CHECK(ivbc_run_query(run, "public", vehicle.c_str(), 0, -1, &denied.value) ==
          IVBC_ERR_ACCESS_DENIED);
    CHECK(ivbc_run_query(run, "warlock", vehicle.c_str(), 0, -1, &denied.value) ==
          IVBC_ERR_USAGE);
    CHECK(ivbc_run_query(run, "police", "zz", 0, -1, &denied.value) == IVBC_ERR_USAGE);
    std::string stranger(64, 'a');
    CHECK(ivbc_run_query(run, "police", stranger.c_str(), 0, -1, &denied.value) ==
          IVBC_ERR_NOT_FOUND);

    OwnedString report;
    REQUIRE(ivbc_run_report(run, "hospital", vehicle.c_str(), &report.value) == IVBC_OK);
    CHECK(report.str().find("\"blocks_sealed\"") != std::string::npos);
    CHECK(ivbc_run_report(run, "public", vehicle.c_str(), &report.value) ==
          IVBC_ERR_ACCESS_DENIED);

    OwnedString audit;
    CHECK(ivbc_run_audit(run, &audit.value) == IVBC_OK);
    CHECK(audit.str().find("\"ok\": true") != std::string::npos);

    OwnedString dir_audit;
    CHECK(ivbc_audit_dir(dir.string().c_str(), &dir_audit.value) == IVBC_OK);
    CHECK(dir_audit.str() == audit.str());

    ivbc_run_close(run);

    SUBCASE("tampering the stored chain turns the audit red") {
        std::fstream f(dir / "blocks.log", std::ios::binary | std::ios::in | std::ios::out);
        REQUIRE(f.good());
        f.seekg(-1, std::ios::end);
        char byte = 0;
        f.read(&byte, 1);
        f.seekp(-1, std::ios::end);
        byte = static_cast<char>(byte ^ 0x01);
        f.write(&byte, 1);
        f.close();

        OwnedString red;
        CHECK(ivbc_audit_dir(dir.string().c_str(), &red.value) == IVBC_ERR_AUDIT);
        CHECK(red.str().find("\"ok\": false") != std::string::npos);
    }
    std::filesystem::remove_all(dir);
}
