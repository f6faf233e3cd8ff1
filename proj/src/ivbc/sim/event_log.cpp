#include "ivbc/sim/event_log.hpp"

#include <cassert>
#include <ostream>
#include <sstream>

namespace ivbc::sim {

const char* event_kind_name(EventKind k) {
    switch (k) {
    case EventKind::MsgSent: return "msg_sent";
    case EventKind::MsgDelivered: return "msg_delivered";
    case EventKind::MsgAccepted: return "msg_accepted";
    case EventKind::MsgRejected: return "msg_rejected";
    case EventKind::AckDelivered: return "ack_delivered";
    case EventKind::TxCreated: return "tx_created";
    case EventKind::TxPooled: return "tx_pooled";
    case EventKind::BeaconRecorded: return "beacon_recorded";
    case EventKind::BlockSealed: return "block_sealed";
    case EventKind::BlockDelivered: return "block_delivered";
    case EventKind::BlockAccepted: return "block_accepted";
    case EventKind::BlockRejected: return "block_rejected";
    case EventKind::BlockOrphaned: return "block_orphaned";
    case EventKind::TipChanged: return "tip_changed";
    case EventKind::ReplaySent: return "replay_sent";
    case EventKind::ForgedSent: return "forged_sent";
    case EventKind::TamperedRelay: return "tampered_relay";
    }
    return "unknown";
}

void EventLog::append(std::uint64_t tick, std::uint32_t node, EventKind kind,
                      const Hash32& digest, std::string detail) {
    assert(events_.empty() || tick >= events_.back().tick);
    events_.push_back({tick, node, kind, digest, std::move(detail)});
}

std::string event_to_json(const Event& e) {
    std::string out;
    out.reserve(140 + e.detail.size());
    out += "{\"tick\":";
    out += std::to_string(e.tick);
    out += ",\"node\":";
    out += std::to_string(e.node);
    out += ",\"kind\":\"";
    out += event_kind_name(e.kind);
    out += "\",\"digest\":\"";
    out += to_hex(e.digest);
    out += "\",\"detail\":\"";
    for (char c : e.detail) {
        // Details use a restricted charset; escape the JSON specials anyway.
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += "\"}";
    return out;
}

void EventLog::write_jsonl(std::ostream& out) const {
    for (const Event& e : events_) out << event_to_json(e) << '\n';
}

std::string EventLog::to_jsonl() const {
    std::ostringstream out;
    write_jsonl(out);
    return out.str();
}

} // namespace ivbc::sim
