#include "ivbc/cloud/query.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace ivbc::cloud {

namespace {

std::string read_text_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw ArchiveError("cannot open " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Hash32 hex_or_throw(const std::string& hex, const char* what) {
    Hash32 out;
    if (!hash_from_hex(hex, out)) throw ArchiveError(std::string("bad hash in ") + what);
    return out;
}

} // namespace

RunArchive RunArchive::load(const std::filesystem::path& dir) {
    RunArchive archive(dir, CloudStore::open(dir));

    // run.json: config echo plus the node roster of the simulation.
    std::filesystem::path run_json = dir / "run.json";
    if (std::filesystem::exists(run_json)) {
        OrderedJson j = OrderedJson::parse(read_text_file(run_json));
        archive.scenario_name_ = j.value("scenario", "");
        std::map<std::string, std::string> cfg;
        if (j.contains("config")) {
            for (auto& [key, value] : j["config"].items()) {
                if (value.is_string()) cfg[key] = value.get<std::string>();
                else cfg[key] = value.dump();
            }
        }
        archive.config_.apply(cfg);
        if (j.contains("nodes")) {
            for (auto& n : j["nodes"]) {
                RunNodeInfo info;
                info.index = n.value("index", 0u);
                info.label = n.value("label", "");
                info.ivtp_id = hex_or_throw(n.value("ivtp_id", std::string(64, '0')), "run.json");
                info.registered = n.value("registered", false);
                info.is_rsu = n.value("is_rsu", false);
                info.adversary = n.value("adversary", "none");
                archive.run_nodes_.push_back(std::move(info));
            }
        }
    }

    for (const Record& rec : archive.store_.records(RecordKind::Provision)) {
        auto entries = decode_provision(rec.body);
        for (ProvisionEntry& e : entries) {
            archive.registry_.add(e.ivtp_id, e.public_key, e.label);
            archive.provision_.push_back(std::move(e));
        }
    }
    for (const Record& rec : archive.store_.records(RecordKind::Block)) {
        archive.blocks_.push_back(Block::decode(rec.body));
        archive.block_record_ids_.push_back(rec.id);
    }
    for (const Record& rec : archive.store_.records(RecordKind::Message)) {
        sim::SafetyMessage msg = sim::SafetyMessage::decode(rec.body);
        archive.message_index_[msg.digest()] = archive.messages_.size();
        archive.messages_.push_back(std::move(msg));
        archive.message_record_ids_.push_back(rec.id);
    }
    auto snapshots = archive.store_.records(RecordKind::Snapshot);
    if (!snapshots.empty()) archive.final_snapshot_ = LedgerState::decode(snapshots.back().body);

    std::filesystem::path events_path = dir / "events.jsonl";
    if (std::filesystem::exists(events_path)) {
        std::ifstream in(events_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            OrderedJson j = OrderedJson::parse(line);
            LoggedEvent ev;
            ev.tick = j.value("tick", 0ull);
            ev.node = j.value("node", 0u);
            ev.kind = j.value("kind", "");
            ev.digest = hex_or_throw(j.value("digest", std::string(64, '0')), "events.jsonl");
            ev.detail = j.value("detail", "");
            archive.events_.push_back(std::move(ev));
        }
    }
    return archive;
}

bool RunArchive::is_provisioned(const Hash32& vehicle) const {
    return std::any_of(provision_.begin(), provision_.end(),
                       [&](const ProvisionEntry& e) { return e.ivtp_id == vehicle; });
}

LedgerState RunArchive::provision_ledger() const {
    LedgerState ledger;
    for (const ProvisionEntry& e : provision_)
        ledger.register_vehicle(e.ivtp_id, e.initial_balance);
    return ledger;
}

LedgerState RunArchive::replay_ledger(std::optional<std::uint64_t> up_to_height) const {
    LedgerState ledger = provision_ledger();
    ChainParams params = config_.chain_params();
    for (const Block& b : blocks_) {
        if (b.header.height == 0) continue; // genesis carries no ledger effects
        if (up_to_height && b.header.height > *up_to_height) break;
        auto result = apply_block(ledger, b, registry_, params);
        if (std::holds_alternative<TxFailure>(result))
            throw ArchiveError("stored chain does not replay at height " +
                               std::to_string(b.header.height));
    }
    return ledger;
}

const sim::SafetyMessage* RunArchive::message_by_digest(const Hash32& digest) const {
    auto it = message_index_.find(digest);
    return it == message_index_.end() ? nullptr : &messages_[it->second];
}

namespace {

bool tx_involves(const Transaction& tx, const Hash32& vehicle) {
    if (tx.sender_ivtp_id == vehicle) return true;
    if (tx.kind == TxKind::DataShare) {
        return std::find(tx.data_share.benefiters.begin(), tx.data_share.benefiters.end(),
                         vehicle) != tx.data_share.benefiters.end();
    }
    return tx.transfer.from == vehicle || tx.transfer.to == vehicle;
}

HistoryResult scan_history(const RunArchive& archive, const Hash32& vehicle,
                           const HistoryQuery& q) {
    HistoryResult out;
    bool want_headers = false, want_txs = false, want_msgs = false;
    for (RecordScope s : q.scopes) {
        if (s == RecordScope::BlockHeaders) want_headers = true;
        if (s == RecordScope::Transactions) want_txs = true;
        if (s == RecordScope::Messages) want_msgs = true;
    }

    for (std::size_t bi = 0; bi < archive.blocks().size(); ++bi) {
        const Block& b = archive.blocks()[bi];
        std::uint64_t record_id = archive.block_record_ids()[bi];
        std::uint64_t ts = b.header.timestamp_ms;
        if (ts < q.from_tick || ts > q.to_tick) continue;
        if (want_headers && b.header.sealer_ivtp_id == vehicle)
            out.headers.push_back({b.header.height, record_id, b.header});
        if (want_txs) {
            for (std::size_t ti = 0; ti < b.transactions.size(); ++ti) {
                const Transaction& tx = b.transactions[ti];
                if (tx_involves(tx, vehicle))
                    out.transactions.push_back({b.header.height, ti, ts, record_id, tx});
            }
        }
    }
    if (want_msgs) {
        for (std::size_t mi = 0; mi < archive.messages().size(); ++mi) {
            const sim::SafetyMessage& m = archive.messages()[mi];
            if (m.sender_ivtp_id != vehicle) continue;
            if (m.tick < q.from_tick || m.tick > q.to_tick) continue;
            out.messages.push_back({m.tick, archive.message_record_ids()[mi], m});
        }
    }

    std::sort(out.headers.begin(), out.headers.end(),
              [](const auto& a, const auto& b) { return a.height < b.height; });
    std::sort(out.transactions.begin(), out.transactions.end(), [](const auto& a, const auto& b) {
        return std::tie(a.height, a.tx_index) < std::tie(b.height, b.tx_index);
    });
    std::sort(out.messages.begin(), out.messages.end(), [](const auto& a, const auto& b) {
        return std::tie(a.tick, a.record_id) < std::tie(b.tick, b.record_id);
    });
    return out;
}

std::filesystem::path index_path(const RunArchive& archive, const Hash32& vehicle) {
    return archive.dir() / "index" / (to_hex(vehicle) + ".jsonl");
}

HistoryResult indexed_history(const RunArchive& archive, const Hash32& vehicle,
                              const HistoryQuery& q) {
    std::filesystem::path p = index_path(archive, vehicle);
    if (!std::filesystem::exists(p)) return scan_history(archive, vehicle, q);

    bool want_headers = false, want_txs = false, want_msgs = false;
    for (RecordScope s : q.scopes) {
        if (s == RecordScope::BlockHeaders) want_headers = true;
        if (s == RecordScope::Transactions) want_txs = true;
        if (s == RecordScope::Messages) want_msgs = true;
    }

    std::map<std::uint64_t, std::size_t> block_by_record;
    for (std::size_t i = 0; i < archive.block_record_ids().size(); ++i)
        block_by_record[archive.block_record_ids()[i]] = i;
    std::map<std::uint64_t, std::size_t> msg_by_record;
    for (std::size_t i = 0; i < archive.message_record_ids().size(); ++i)
        msg_by_record[archive.message_record_ids()[i]] = i;

    HistoryResult out;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        OrderedJson j = OrderedJson::parse(line);
        std::string kind = j.value("kind", "");
        std::uint64_t record_id = j.value("record_id", 0ull);
        if (kind == "tx" && want_txs) {
            auto bit = block_by_record.find(record_id);
            if (bit == block_by_record.end()) continue;
            const Block& b = archive.blocks()[bit->second];
            std::uint64_t ti = j.value("tx_index", 0ull);
            if (ti >= b.transactions.size()) continue;
            std::uint64_t ts = b.header.timestamp_ms;
            if (ts < q.from_tick || ts > q.to_tick) continue;
            out.transactions.push_back({b.header.height, ti, ts, record_id, b.transactions[ti]});
        } else if (kind == "header" && want_headers) {
            auto bit = block_by_record.find(record_id);
            if (bit == block_by_record.end()) continue;
            const Block& b = archive.blocks()[bit->second];
            std::uint64_t ts = b.header.timestamp_ms;
            if (ts < q.from_tick || ts > q.to_tick) continue;
            out.headers.push_back({b.header.height, record_id, b.header});
        } else if (kind == "msg" && want_msgs) {
            auto mit = msg_by_record.find(record_id);
            if (mit == msg_by_record.end()) continue;
            const sim::SafetyMessage& m = archive.messages()[mit->second];
            if (m.tick < q.from_tick || m.tick > q.to_tick) continue;
            out.messages.push_back({m.tick, record_id, m});
        }
    }

    std::sort(out.headers.begin(), out.headers.end(),
              [](const auto& a, const auto& b) { return a.height < b.height; });
    std::sort(out.transactions.begin(), out.transactions.end(), [](const auto& a, const auto& b) {
        return std::tie(a.height, a.tx_index) < std::tie(b.height, b.tx_index);
    });
    std::sort(out.messages.begin(), out.messages.end(), [](const auto& a, const auto& b) {
        return std::tie(a.tick, a.record_id) < std::tie(b.tick, b.record_id);
    });
    return out;
}

} // namespace

std::string HistoryResult::to_jsonl() const {
    std::string out;
    for (const HeaderEntry& h : headers) {
        OrderedJson j;
        j["type"] = "header";
        j["height"] = h.height;
        j["record_id"] = h.record_id;
        j["hash"] = to_hex(h.header.hash());
        j["sealer"] = to_hex(h.header.sealer_ivtp_id);
        j["timestamp_ms"] = h.header.timestamp_ms;
        out += j.dump();
        out += '\n';
    }
    for (const TxEntry& t : transactions) {
        OrderedJson j;
        j["type"] = "transaction";
        j["height"] = t.height;
        j["tx_index"] = t.tx_index;
        j["block_timestamp_ms"] = t.block_timestamp;
        j["record_id"] = t.record_id;
        j["tx"] = tx_to_json(t.tx);
        out += j.dump();
        out += '\n';
    }
    for (const MsgEntry& m : messages) {
        OrderedJson j;
        j["type"] = "message";
        j["tick"] = m.tick;
        j["record_id"] = m.record_id;
        j["message"] = message_to_json(m.msg);
        out += j.dump();
        out += '\n';
    }
    return out;
}

bool history_equal(const HistoryResult& a, const HistoryResult& b) {
    return a.to_jsonl() == b.to_jsonl();
}

HistoryResult query_history(const RunArchive& archive, AccessRole role, const Hash32& vehicle,
                            const HistoryQuery& query) {
    for (RecordScope scope : query.scopes)
        if (!role_allows(role, scope)) throw AccessDenied(role, scope);
    if (!archive.is_provisioned(vehicle)) throw UnknownVehicleError(to_hex(vehicle));
    return query.use_index ? indexed_history(archive, vehicle, query)
                           : scan_history(archive, vehicle, query);
}

OrderedJson VehicleReport::to_json() const {
    OrderedJson j;
    j["vehicle"] = to_hex(vehicle);
    j["label"] = label;
    j["balance"] = balance;
    j["blocks_sealed"] = blocks_sealed;
    j["messages_shared"] = messages_shared;
    j["messages_benefited"] = messages_benefited;
    j["rejected_messages"] = rejected_messages;
    return j;
}

VehicleReport reputation_report(const RunArchive& archive, AccessRole role,
                                const Hash32& vehicle) {
    if (!role_allows(role, RecordScope::Reputation))
        throw AccessDenied(role, RecordScope::Reputation);
    if (!archive.is_provisioned(vehicle)) throw UnknownVehicleError(to_hex(vehicle));

    VehicleReport report;
    report.vehicle = vehicle;
    for (const ProvisionEntry& e : archive.provision())
        if (e.ivtp_id == vehicle) report.label = e.label;

    LedgerState ledger = archive.replay_ledger();
    report.balance = ledger.balance(vehicle).value_or(0);

    for (const Block& b : archive.blocks()) {
        if (b.header.height == 0) continue;
        if (b.header.sealer_ivtp_id == vehicle) report.blocks_sealed += 1;
        for (const Transaction& tx : b.transactions) {
            if (tx.kind != TxKind::DataShare) continue;
            const auto& bens = tx.data_share.benefiters;
            if (std::find(bens.begin(), bens.end(), vehicle) != bens.end())
                report.messages_benefited += 1;
        }
    }
    // Stored messages claiming this sender count only when the signature
    // actually verifies; impersonations must not inflate the victim.
    const IdentityRegistry::Entry* key = archive.registry().find(vehicle);
    auto authentic = [&](const sim::SafetyMessage& m) {
        return m.sender_ivtp_id == vehicle && key != nullptr &&
               m.signature_valid(key->public_key);
    };
    for (const sim::SafetyMessage& m : archive.messages())
        if (authentic(m)) report.messages_shared += 1;

    for (const LoggedEvent& ev : archive.events()) {
        if (ev.kind != "msg_rejected") continue;
        const sim::SafetyMessage* msg = archive.message_by_digest(ev.digest);
        if (msg == nullptr || !authentic(*msg)) continue;
        report.rejected_messages += 1;
    }
    return report;
}

void build_index(const RunArchive& archive) {
    std::filesystem::path index_dir = archive.dir() / "index";
    std::filesystem::create_directories(index_dir);

    for (const ProvisionEntry& entry : archive.provision()) {
        const Hash32& vehicle = entry.ivtp_id;
        std::ofstream out(index_dir / (to_hex(vehicle) + ".jsonl"),
                          std::ios::binary | std::ios::trunc);
        if (!out) throw ArchiveError("cannot write index for " + to_hex(vehicle));

        for (std::size_t bi = 0; bi < archive.blocks().size(); ++bi) {
            const Block& b = archive.blocks()[bi];
            std::uint64_t record_id = archive.block_record_ids()[bi];
            if (b.header.sealer_ivtp_id == vehicle) {
                OrderedJson j;
                j["kind"] = "header";
                j["record_id"] = record_id;
                j["height"] = b.header.height;
                out << j.dump() << '\n';
            }
            for (std::size_t ti = 0; ti < b.transactions.size(); ++ti) {
                if (!tx_involves(b.transactions[ti], vehicle)) continue;
                OrderedJson j;
                j["kind"] = "tx";
                j["record_id"] = record_id;
                j["height"] = b.header.height;
                j["tx_index"] = ti;
                out << j.dump() << '\n';
            }
        }
        for (std::size_t mi = 0; mi < archive.messages().size(); ++mi) {
            if (archive.messages()[mi].sender_ivtp_id != vehicle) continue;
            OrderedJson j;
            j["kind"] = "msg";
            j["record_id"] = archive.message_record_ids()[mi];
            j["tick"] = archive.messages()[mi].tick;
            out << j.dump() << '\n';
        }
    }
}

} // namespace ivbc::cloud
