#pragma once

#include "ivbc/hash.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ivbc::sim {

enum class EventKind : std::uint8_t {
    MsgSent,
    MsgDelivered,
    MsgAccepted,
    MsgRejected,
    AckDelivered,
    TxCreated,
    TxPooled,
    BeaconRecorded,
    BlockSealed,
    BlockDelivered,
    BlockAccepted,
    BlockRejected,
    BlockOrphaned,
    TipChanged,
    ReplaySent,
    ForgedSent,
    TamperedRelay,
};

const char* event_kind_name(EventKind k);

/// One observable step of the simulation. `digest` identifies the payload
/// (message digest, block hash, txid); `detail` carries a short
/// kind-specific note such as a reject reason.
struct Event {
    std::uint64_t tick = 0;
    std::uint32_t node = 0;
    EventKind kind = EventKind::MsgSent;
    Hash32 digest{};
    std::string detail;
};

/// Append-only run record, ordered by tick. Complete enough to replay
/// every verdict after the fact.
class EventLog {
public:
    void append(std::uint64_t tick, std::uint32_t node, EventKind kind, const Hash32& digest,
                std::string detail = {});

    const std::vector<Event>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }

    /// One JSON object per line, stable field order.
    void write_jsonl(std::ostream& out) const;
    std::string to_jsonl() const;

private:
    std::vector<Event> events_;
};

std::string event_to_json(const Event& e);

} // namespace ivbc::sim
