#pragma once

#include "ivbc/chain_store.hpp"
#include "ivbc/sim/config.hpp"
#include "ivbc/sim/event_log.hpp"
#include "ivbc/sim/message.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace ivbc::sim {

struct RoutePoint {
    double x = 0.0;
    double y = 0.0;
};

struct VehicleSpec {
    std::string label;
    std::vector<RoutePoint> waypoints; // one point means stationary
    double speed_mps = 14.0;
};

enum class AdversaryBehavior : std::uint8_t {
    None,
    ReplayAttacker,
    ForgedIvtp,
    TamperedBlockRelay,
};

const char* adversary_behavior_name(AdversaryBehavior b);
std::optional<AdversaryBehavior> adversary_behavior_from_name(std::string_view name);

struct AdversarySpec {
    AdversaryBehavior behavior = AdversaryBehavior::None;
    RoutePoint position{0.0, 0.0};
};

struct MessagePlan {
    std::uint64_t tick = 0;
    std::uint32_t sender = 0; // vehicle index
    SafetyKind kind = SafetyKind::HazardAhead;
};

/// Deliveries between group_a and everyone else are suppressed while
/// from_tick <= tick < until_tick.
struct PartitionPlan {
    std::uint64_t from_tick = 0;
    std::uint64_t until_tick = 0;
    std::vector<std::uint32_t> group_a;
};

struct WorldSetup {
    std::vector<VehicleSpec> vehicles;
    bool with_rsu = false;
    RoutePoint rsu_position{0.0, 0.0};
    std::vector<AdversarySpec> adversaries;
    std::vector<MessagePlan> messages;
    std::vector<PartitionPlan> partitions;
};

/// All randomness of a run flows through this one engine. Draws happen
/// only when deliveries are scheduled: for each candidate receiver in
/// ascending node order, one uniform for the drop decision, then one
/// uniform for the latency if kept. Replaying that sequence reproduces
/// a run bit for bit.
class SimRng {
public:
    explicit SimRng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t uniform_range(std::uint64_t lo, std::uint64_t hi) {
        return lo + engine_() % (hi - lo + 1);
    }

private:
    std::mt19937_64 engine_;
};

enum class RejectReason : std::uint8_t {
    None,
    UnknownIvtp,
    BadSignature,
    NonceReplay,
    Stale,
};

const char* reject_reason_name(RejectReason r);

struct LegalityVerdict {
    bool accepted = false;
    RejectReason reason = RejectReason::None;
};

struct UnknownSender : std::out_of_range {
    UnknownSender() : std::out_of_range("sender is not a node of this world") {}
};

/// One node of the VANET: identity, position script, chain replica and
/// the protocol state machine.
struct Node {
    std::uint32_t index = 0;
    std::string label;
    VehicleIdentity identity;
    bool registered = false; // carries an IV-TP balance and may seal
    bool is_rsu = false;
    AdversaryBehavior adversary = AdversaryBehavior::None;
    std::vector<RoutePoint> waypoints;
    double speed_mps = 0.0;

    ChainStore chain;

    // Mempool keyed (sender, nonce): deterministic body order at sealing.
    std::map<std::pair<Hash32, std::uint64_t>, Transaction> mempool;
    std::set<Hash32> seen_txids;

    // Legality state: accepted nonces per sender, plus accepted digests.
    std::map<Hash32, std::set<std::uint64_t>> accepted_nonces;
    std::set<Hash32> accepted_digests;
    std::set<Hash32> relayed_digests;

    struct PendingShare {
        SafetyMessage message;
        std::vector<Hash32> benefiters; // ack arrival order
    };
    std::map<Hash32, PendingShare> pending_shares;

    std::vector<DrivingBeacon> beacon_history; // ascending ticks
    DrivingScore score;
    std::uint64_t odometer_reported_m = 0;
    std::uint64_t next_tx_nonce = 1;
    std::uint64_t next_msg_nonce = 1;

    // adversary scratch
    std::vector<SafetyMessage> replay_pool;
    std::size_t replay_cursor = 0;
    std::uint64_t forged_counter = 0;
    std::set<Hash32> tampered_blocks;

    Node(std::uint32_t idx, std::string lbl, VehicleIdentity id, ChainStore store)
        : index(idx), label(std::move(lbl)), identity(std::move(id)), chain(std::move(store)) {
        score.vehicle_ivtp_id = identity.ivtp_id;
    }

    RoutePoint position_at(std::uint64_t tick) const;
    double odometer_at(std::uint64_t tick) const;
};

/// Deterministic discrete-event simulation of vehicles exchanging safety
/// messages and blocks. Strictly single threaded; events are processed
/// in (tick, sequence) order and every outcome is a pure function of the
/// configuration and setup.
class World {
public:
    World(SimConfig config, WorldSetup setup);

    /// Processes every queued event with tick <= until_tick.
    void step(std::uint64_t until_tick);
    void run() { step(config_.duration_ticks); }

    std::uint64_t current_tick() const { return tick_; }

    /// Transport-level broadcast: schedules delivery to every reachable
    /// node after a seeded latency draw unless dropped. Returns the
    /// (node, delivery tick) schedule. Throws UnknownSender.
    std::vector<std::pair<std::uint32_t, std::uint64_t>> broadcast(std::uint32_t sender,
                                                                   const SafetyMessage& msg);

    /// Pure legality check of a message as seen by `receiver` right now.
    LegalityVerdict check_legality(std::uint32_t receiver, const SafetyMessage& msg) const;

    /// Adds a misbehaving node. Only valid at a tick boundary (between
    /// step calls).
    std::uint32_t inject_adversary(const AdversarySpec& spec);

    std::size_t node_count() const { return nodes_.size(); }
    const Node& node(std::uint32_t index) const { return *nodes_.at(index); }
    Node& node_mut(std::uint32_t index) { return *nodes_.at(index); }
    std::vector<std::uint32_t> honest_nodes() const; // registered or RSU

    const SimConfig& config() const { return config_; }
    const ChainParams& params() const { return params_; }
    const IdentityRegistry& registry() const { return registry_; }
    const EventLog& event_log() const { return log_; }
    const std::vector<SafetyMessage>& message_archive() const { return archive_; }
    const LedgerState& genesis_ledger() const { return genesis_ledger_; }

private:
    struct SimEvent {
        enum class Type : std::uint8_t {
            DeliverMessage,
            DeliverAck,
            DeliverTx,
            DeliverBlock,
            DeliverGetBlocks,
            BeaconTimer,
            SealTimer,
            SyncTimer,
            AckWindowClose,
            ScriptedMessage,
            AdversaryTimer,
        };

        std::uint64_t tick = 0;
        std::uint64_t seq = 0;
        Type type = Type::BeaconTimer;
        std::uint32_t target = 0;
        std::uint32_t from = 0;
        SafetyKind msg_kind = SafetyKind::HazardAhead;
        Hash32 ref{};
        Hash32 aux{};
        std::shared_ptr<const SafetyMessage> msg;
        std::shared_ptr<const Transaction> tx;
        std::shared_ptr<const Block> block;
    };

    struct EventOrder {
        bool operator()(const SimEvent& a, const SimEvent& b) const {
            if (a.tick != b.tick) return a.tick > b.tick;
            return a.seq > b.seq;
        }
    };

    void add_node(std::string label, VehicleIdentity id, bool registered, bool is_rsu,
                  AdversaryBehavior adversary, std::vector<RoutePoint> waypoints, double speed);
    void schedule(std::uint64_t tick, SimEvent ev);
    void dispatch(const SimEvent& ev);

    bool reachable(const Node& a, const Node& b, std::uint64_t tick) const;
    bool partitioned(std::uint32_t a, std::uint32_t b, std::uint64_t tick) const;

    // Seeded transport draws; see SimRng for the documented order.
    std::vector<std::pair<std::uint32_t, std::uint64_t>>
    flood_message(std::uint32_t sender, const std::shared_ptr<const SafetyMessage>& msg);
    void flood_tx(std::uint32_t sender, const std::shared_ptr<const Transaction>& tx);
    void flood_block(std::uint32_t sender, const std::shared_ptr<const Block>& block);
    bool unicast_draw(std::uint32_t from, std::uint32_t to, std::uint64_t& latency_out);

    void archive_message(const SafetyMessage& msg);
    void emit_message(std::uint32_t sender, SafetyKind kind);

    void on_message(const SimEvent& ev);
    void on_ack(const SimEvent& ev);
    void on_tx(const SimEvent& ev);
    void on_block(const SimEvent& ev);
    void on_get_blocks(const SimEvent& ev);
    void on_beacon_timer(const SimEvent& ev);
    void on_seal_timer(const SimEvent& ev);
    void on_sync_timer(const SimEvent& ev);
    void on_ack_window_close(const SimEvent& ev);
    void on_adversary_timer(const SimEvent& ev);

    void note_tip_change(Node& n, const TipReport& report);
    void prune_mempool(Node& n);

    SimConfig config_;
    ChainParams params_;
    IdentityRegistry registry_;
    LedgerState genesis_ledger_;
    std::vector<std::unique_ptr<Node>> nodes_;
    std::uint32_t vehicle_count_ = 0;
    std::vector<PartitionPlan> partitions_;

    SimRng rng_;
    std::priority_queue<SimEvent, std::vector<SimEvent>, EventOrder> queue_;
    std::uint64_t seq_counter_ = 0;
    std::uint64_t tick_ = 0;
    bool stepping_ = false;

    EventLog log_;
    std::vector<SafetyMessage> archive_;
    std::set<Hash32> archived_digests_;
};

} // namespace ivbc::sim
