#include "ivbc/sim/world.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace ivbc::sim {

const char* adversary_behavior_name(AdversaryBehavior b) {
    switch (b) {
    case AdversaryBehavior::None: return "none";
    case AdversaryBehavior::ReplayAttacker: return "replay_attacker";
    case AdversaryBehavior::ForgedIvtp: return "forged_ivtp";
    case AdversaryBehavior::TamperedBlockRelay: return "tampered_block_relay";
    }
    return "unknown";
}

std::optional<AdversaryBehavior> adversary_behavior_from_name(std::string_view name) {
    if (name == "replay_attacker") return AdversaryBehavior::ReplayAttacker;
    if (name == "forged_ivtp") return AdversaryBehavior::ForgedIvtp;
    if (name == "tampered_block_relay") return AdversaryBehavior::TamperedBlockRelay;
    if (name == "none") return AdversaryBehavior::None;
    return std::nullopt;
}

const char* reject_reason_name(RejectReason r) {
    switch (r) {
    case RejectReason::None: return "None";
    case RejectReason::UnknownIvtp: return "UnknownIVTP";
    case RejectReason::BadSignature: return "BadSignature";
    case RejectReason::NonceReplay: return "NonceReplay";
    case RejectReason::Stale: return "Stale";
    }
    return "Unknown";
}

RoutePoint Node::position_at(std::uint64_t tick) const {
    if (waypoints.empty()) return {0.0, 0.0};
    if (waypoints.size() == 1 || speed_mps <= 0.0) return waypoints.front();

    double travelled = speed_mps * (static_cast<double>(tick) / 1000.0);
    for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
        const RoutePoint& a = waypoints[i];
        const RoutePoint& b = waypoints[i + 1];
        double leg = std::hypot(b.x - a.x, b.y - a.y);
        if (travelled <= leg || leg == 0.0) {
            double f = (leg == 0.0) ? 0.0 : travelled / leg;
            return {a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f};
        }
        travelled -= leg;
    }
    return waypoints.back(); // route finished, vehicle parks
}

double Node::odometer_at(std::uint64_t tick) const {
    if (waypoints.size() < 2 || speed_mps <= 0.0) return 0.0;
    double length = 0.0;
    for (std::size_t i = 0; i + 1 < waypoints.size(); ++i)
        length += std::hypot(waypoints[i + 1].x - waypoints[i].x,
                             waypoints[i + 1].y - waypoints[i].y);
    return std::min(speed_mps * (static_cast<double>(tick) / 1000.0), length);
}

World::World(SimConfig config, WorldSetup setup)
    : config_(std::move(config)), params_(config_.chain_params()),
      partitions_(std::move(setup.partitions)), rng_(config_.seed) {
    config_.validate();

    // Vehicles first (node indices 0..V-1), then the RSU, then adversaries.
    // Only vehicles are registered: the RSU and attackers hold no IV-TP.
    std::vector<VehicleIdentity> vehicle_ids;
    for (std::size_t i = 0; i < setup.vehicles.size(); ++i) {
        const VehicleSpec& v = setup.vehicles[i];
        VehicleIdentity id =
            VehicleIdentity::from_seed(derive_key_seed(config_.seed, i, v.label), v.label);
        registry_.add(id.ivtp_id, id.keys.public_key, id.label);
        if (genesis_ledger_.register_vehicle(id.ivtp_id, config_.initial_balance))
            throw std::invalid_argument("duplicate vehicle identity in roster: " + v.label);
        vehicle_ids.push_back(std::move(id));
    }
    vehicle_count_ = static_cast<std::uint32_t>(setup.vehicles.size());

    for (std::size_t i = 0; i < setup.vehicles.size(); ++i) {
        const VehicleSpec& v = setup.vehicles[i];
        add_node(v.label, std::move(vehicle_ids[i]), true, false, AdversaryBehavior::None,
                 v.waypoints, v.speed_mps);
    }
    if (setup.with_rsu) {
        VehicleIdentity id =
            VehicleIdentity::from_seed(derive_key_seed(config_.seed, 1u << 20, "rsu"), "rsu");
        add_node("rsu", std::move(id), false, true, AdversaryBehavior::None,
                 {setup.rsu_position}, 0.0);
    }
    for (const AdversarySpec& a : setup.adversaries) inject_adversary(a);

    for (const MessagePlan& plan : setup.messages) {
        if (plan.sender >= vehicle_count_)
            throw std::invalid_argument("scripted message names an unknown vehicle");
        SimEvent ev;
        ev.type = SimEvent::Type::ScriptedMessage;
        ev.target = plan.sender;
        ev.msg_kind = plan.kind;
        schedule(plan.tick, std::move(ev));
    }
}

void World::add_node(std::string label, VehicleIdentity id, bool registered, bool is_rsu,
                     AdversaryBehavior adversary, std::vector<RoutePoint> waypoints,
                     double speed) {
    auto index = static_cast<std::uint32_t>(nodes_.size());
    ChainStore store(registry_, genesis_ledger_, params_);
    auto node = std::make_unique<Node>(index, std::move(label), std::move(id), std::move(store));
    node->registered = registered;
    node->is_rsu = is_rsu;
    node->adversary = adversary;
    node->waypoints = std::move(waypoints);
    node->speed_mps = speed;
    nodes_.push_back(std::move(node));

    Node& n = *nodes_.back();
    std::uint64_t first = tick_ + 1;
    if (n.registered) {
        SimEvent beacon;
        beacon.type = SimEvent::Type::BeaconTimer;
        beacon.target = index;
        schedule(std::max(first, kBeaconIntervalTicks), std::move(beacon));

        // Stagger seal slots across vehicles so rounds overlap less.
        std::uint64_t offset = (index * kSealIntervalTicks) / std::max(1u, vehicle_count_);
        SimEvent seal;
        seal.type = SimEvent::Type::SealTimer;
        seal.target = index;
        schedule(std::max(first, kSealIntervalTicks + offset), std::move(seal));
    }
    if (n.registered || n.is_rsu) {
        SimEvent sync;
        sync.type = SimEvent::Type::SyncTimer;
        sync.target = index;
        schedule(std::max(first, kSyncIntervalTicks), std::move(sync));
    }
    if (n.adversary == AdversaryBehavior::ReplayAttacker ||
        n.adversary == AdversaryBehavior::ForgedIvtp) {
        SimEvent adv;
        adv.type = SimEvent::Type::AdversaryTimer;
        adv.target = index;
        schedule(std::max(first, kAdversaryIntervalTicks + index), std::move(adv));
    }
}

std::uint32_t World::inject_adversary(const AdversarySpec& spec) {
    if (stepping_) throw std::logic_error("inject_adversary only at a tick boundary");
    auto index = static_cast<std::uint32_t>(nodes_.size());
    std::string label = adversary_behavior_name(spec.behavior);
    label += "_" + std::to_string(index);
    VehicleIdentity id = VehicleIdentity::from_seed(
        derive_key_seed(config_.seed, (1u << 20) + 1 + index, label), label);
    add_node(std::move(label), std::move(id), false, false, spec.behavior, {spec.position}, 0.0);
    return index;
}

std::vector<std::uint32_t> World::honest_nodes() const {
    std::vector<std::uint32_t> out;
    for (const auto& n : nodes_)
        if (n->adversary == AdversaryBehavior::None) out.push_back(n->index);
    return out;
}

void World::schedule(std::uint64_t tick, SimEvent ev) {
    ev.tick = tick;
    ev.seq = seq_counter_++;
    queue_.push(std::move(ev));
}

void World::step(std::uint64_t until_tick) {
    if (until_tick < tick_) throw std::invalid_argument("cannot step backwards");
    stepping_ = true;
    while (!queue_.empty() && queue_.top().tick <= until_tick) {
        SimEvent ev = queue_.top();
        queue_.pop();
        tick_ = ev.tick;
        dispatch(ev);
    }
    tick_ = until_tick;
    stepping_ = false;
}

void World::dispatch(const SimEvent& ev) {
    switch (ev.type) {
    case SimEvent::Type::DeliverMessage: on_message(ev); break;
    case SimEvent::Type::DeliverAck: on_ack(ev); break;
    case SimEvent::Type::DeliverTx: on_tx(ev); break;
    case SimEvent::Type::DeliverBlock: on_block(ev); break;
    case SimEvent::Type::DeliverGetBlocks: on_get_blocks(ev); break;
    case SimEvent::Type::BeaconTimer: on_beacon_timer(ev); break;
    case SimEvent::Type::SealTimer: on_seal_timer(ev); break;
    case SimEvent::Type::SyncTimer: on_sync_timer(ev); break;
    case SimEvent::Type::AckWindowClose: on_ack_window_close(ev); break;
    case SimEvent::Type::ScriptedMessage: emit_message(ev.target, ev.msg_kind); break;
    case SimEvent::Type::AdversaryTimer: on_adversary_timer(ev); break;
    }
}

bool World::partitioned(std::uint32_t a, std::uint32_t b, std::uint64_t tick) const {
    for (const PartitionPlan& p : partitions_) {
        if (tick < p.from_tick || tick >= p.until_tick) continue;
        bool a_in = std::find(p.group_a.begin(), p.group_a.end(), a) != p.group_a.end();
        bool b_in = std::find(p.group_a.begin(), p.group_a.end(), b) != p.group_a.end();
        if (a_in != b_in) return true;
    }
    return false;
}

bool World::reachable(const Node& a, const Node& b, std::uint64_t tick) const {
    if (partitioned(a.index, b.index, tick)) return false;
    if (a.is_rsu || b.is_rsu) return true; // V2I link, unlimited range
    RoutePoint pa = a.position_at(tick);
    RoutePoint pb = b.position_at(tick);
    return std::hypot(pb.x - pa.x, pb.y - pa.y) <= config_.radio_range_m;
}

bool World::unicast_draw(std::uint32_t from, std::uint32_t to, std::uint64_t& latency_out) {
    if (!reachable(*nodes_[from], *nodes_[to], tick_)) return false;
    if (rng_.uniform01() < config_.drop_probability) return false;
    latency_out = rng_.uniform_range(config_.latency_min_ticks, config_.latency_max_ticks);
    return true;
}

std::vector<std::pair<std::uint32_t, std::uint64_t>>
World::flood_message(std::uint32_t sender, const std::shared_ptr<const SafetyMessage>& msg) {
    std::vector<std::pair<std::uint32_t, std::uint64_t>> schedule_out;
    for (std::uint32_t j = 0; j < nodes_.size(); ++j) {
        if (j == sender) continue;
        std::uint64_t latency = 0;
        if (!unicast_draw(sender, j, latency)) continue;
        SimEvent ev;
        ev.type = SimEvent::Type::DeliverMessage;
        ev.target = j;
        ev.from = sender;
        ev.msg = msg;
        schedule(tick_ + latency, std::move(ev));
        schedule_out.emplace_back(j, tick_ + latency);
    }
    return schedule_out;
}

void World::flood_tx(std::uint32_t sender, const std::shared_ptr<const Transaction>& tx) {
    for (std::uint32_t j = 0; j < nodes_.size(); ++j) {
        if (j == sender) continue;
        std::uint64_t latency = 0;
        if (!unicast_draw(sender, j, latency)) continue;
        SimEvent ev;
        ev.type = SimEvent::Type::DeliverTx;
        ev.target = j;
        ev.from = sender;
        ev.tx = tx;
        schedule(tick_ + latency, std::move(ev));
    }
}

void World::flood_block(std::uint32_t sender, const std::shared_ptr<const Block>& block) {
    for (std::uint32_t j = 0; j < nodes_.size(); ++j) {
        if (j == sender) continue;
        std::uint64_t latency = 0;
        if (!unicast_draw(sender, j, latency)) continue;
        SimEvent ev;
        ev.type = SimEvent::Type::DeliverBlock;
        ev.target = j;
        ev.from = sender;
        ev.block = block;
        schedule(tick_ + latency, std::move(ev));
    }
}

void World::archive_message(const SafetyMessage& msg) {
    if (archived_digests_.insert(msg.digest()).second) archive_.push_back(msg);
}

std::vector<std::pair<std::uint32_t, std::uint64_t>>
World::broadcast(std::uint32_t sender, const SafetyMessage& msg) {
    if (sender >= nodes_.size()) throw UnknownSender();
    auto shared = std::make_shared<const SafetyMessage>(msg);
    log_.append(tick_, sender, EventKind::MsgSent, shared->digest());
    archive_message(*shared);
    return flood_message(sender, shared);
}

void World::emit_message(std::uint32_t sender, SafetyKind kind) {
    Node& n = *nodes_[sender];
    RoutePoint pos = n.position_at(tick_);
    SafetyMessage msg = make_safety_message(n.identity, kind, std::llround(pos.x * 1000.0),
                                            std::llround(pos.y * 1000.0), tick_,
                                            n.next_msg_nonce++);
    Hash32 digest = msg.digest();
    n.pending_shares.emplace(digest, Node::PendingShare{msg, {}});
    // The sender has seen its own message; replays of it are stale news.
    n.accepted_nonces[msg.sender_ivtp_id].insert(msg.msg_nonce);
    n.accepted_digests.insert(digest);

    SimEvent close;
    close.type = SimEvent::Type::AckWindowClose;
    close.target = sender;
    close.ref = digest;
    schedule(tick_ + kAckWindowTicks, std::move(close));

    broadcast(sender, msg);
}

LegalityVerdict World::check_legality(std::uint32_t receiver, const SafetyMessage& msg) const {
    const Node& n = *nodes_.at(receiver);
    const IdentityRegistry::Entry* sender = registry_.find(msg.sender_ivtp_id);
    if (sender == nullptr) return {false, RejectReason::UnknownIvtp};
    if (!msg.signature_valid(sender->public_key)) return {false, RejectReason::BadSignature};
    auto it = n.accepted_nonces.find(msg.sender_ivtp_id);
    if (it != n.accepted_nonces.end() && it->second.contains(msg.msg_nonce))
        return {false, RejectReason::NonceReplay};
    if (msg.tick > tick_ || tick_ - msg.tick > kFreshnessWindowTicks)
        return {false, RejectReason::Stale};
    return {true, RejectReason::None};
}

void World::on_message(const SimEvent& ev) {
    Node& n = *nodes_[ev.target];
    const SafetyMessage& msg = *ev.msg;
    Hash32 digest = msg.digest();
    log_.append(tick_, n.index, EventKind::MsgDelivered, digest);

    if (n.adversary == AdversaryBehavior::ReplayAttacker) {
        n.replay_pool.push_back(msg);
        return;
    }
    if (n.adversary != AdversaryBehavior::None) return;

    LegalityVerdict verdict = check_legality(n.index, msg);
    if (!verdict.accepted) {
        log_.append(tick_, n.index, EventKind::MsgRejected, digest,
                    reject_reason_name(verdict.reason));
        return;
    }

    n.accepted_nonces[msg.sender_ivtp_id].insert(msg.msg_nonce);
    n.accepted_digests.insert(digest);
    log_.append(tick_, n.index, EventKind::MsgAccepted, digest);

    // Acknowledge to the provider: the receiver becomes a benefiter of
    // the share once the provider records the ack. The RSU relays but
    // holds no balance, so it never acks.
    if (n.registered) {
        for (std::uint32_t j = 0; j < nodes_.size(); ++j) {
            if (nodes_[j]->identity.ivtp_id != msg.sender_ivtp_id) continue;
            std::uint64_t latency = 0;
            if (unicast_draw(n.index, j, latency)) {
                SimEvent ack;
                ack.type = SimEvent::Type::DeliverAck;
                ack.target = j;
                ack.from = n.index;
                ack.ref = digest;
                ack.aux = n.identity.ivtp_id;
                schedule(tick_ + latency, std::move(ack));
            }
            break;
        }
    }

    if (n.relayed_digests.insert(digest).second) flood_message(n.index, ev.msg);
}

void World::on_ack(const SimEvent& ev) {
    Node& n = *nodes_[ev.target];
    auto it = n.pending_shares.find(ev.ref);
    log_.append(tick_, n.index, EventKind::AckDelivered, ev.ref);
    if (it == n.pending_shares.end()) return; // window already closed
    Node::PendingShare& share = it->second;
    if (ev.aux == n.identity.ivtp_id) return;
    if (std::find(share.benefiters.begin(), share.benefiters.end(), ev.aux) ==
        share.benefiters.end())
        share.benefiters.push_back(ev.aux);
}

void World::on_ack_window_close(const SimEvent& ev) {
    Node& n = *nodes_[ev.target];
    auto it = n.pending_shares.find(ev.ref);
    if (it == n.pending_shares.end()) return;
    Node::PendingShare share = std::move(it->second);
    n.pending_shares.erase(it);

    auto tx = std::make_shared<const Transaction>(make_data_share(
        n.identity, ev.ref, std::move(share.benefiters), n.next_tx_nonce++));
    n.seen_txids.insert(tx->txid());
    n.mempool.emplace(std::make_pair(tx->sender_ivtp_id, tx->nonce), *tx);
    log_.append(tick_, n.index, EventKind::TxCreated, tx->txid());
    flood_tx(n.index, tx);
}

void World::on_tx(const SimEvent& ev) {
    Node& n = *nodes_[ev.target];
    if (n.adversary != AdversaryBehavior::None) return;
    const Transaction& tx = *ev.tx;
    Hash32 txid = tx.txid();
    if (!n.seen_txids.insert(txid).second) return;

    const IdentityRegistry::Entry* sender = registry_.find(tx.sender_ivtp_id);
    if (sender == nullptr || !tx.signature_valid(sender->public_key)) return;
    if (tx.nonce <= n.chain.tip_ledger().nonce_watermark(tx.sender_ivtp_id)) return;

    n.mempool.emplace(std::make_pair(tx.sender_ivtp_id, tx.nonce), tx);
    log_.append(tick_, n.index, EventKind::TxPooled, txid);
    flood_tx(n.index, ev.tx);
}

void World::on_beacon_timer(const SimEvent& ev) {
    Node& n = *nodes_[ev.target];
    SimEvent next;
    next.type = SimEvent::Type::BeaconTimer;
    next.target = n.index;
    schedule(tick_ + kBeaconIntervalTicks, std::move(next));

    auto total_m = static_cast<std::uint64_t>(std::floor(n.odometer_at(tick_)));
    std::uint64_t dist = total_m - n.odometer_reported_m;
    n.odometer_reported_m = total_m;

    DrivingBeacon beacon = make_beacon(n.identity, tick_, dist);
    auto err = accumulate(n.score, beacon, n.identity.keys.public_key);
    assert(!err);
    (void)err;
    n.beacon_history.push_back(std::move(beacon));
    log_.append(tick_, n.index, EventKind::BeaconRecorded,
                double_sha256(n.beacon_history.back().encode()), std::to_string(dist));
}

void World::on_seal_timer(const SimEvent& ev) {
    Node& n = *nodes_[ev.target];
    SimEvent next;
    next.type = SimEvent::Type::SealTimer;
    next.target = n.index;
    schedule(tick_ + kSealIntervalTicks, std::move(next));

    prune_mempool(n);
    if (n.mempool.empty()) return;

    const ChainStore::StoredBlock* tip = n.chain.find(n.chain.tip());
    std::vector<Transaction> txs;
    txs.reserve(n.mempool.size());
    for (const auto& [_, tx] : n.mempool) txs.push_back(tx);

    // Beacons earned since this vehicle's previous block on this branch.
    std::uint64_t since = n.chain.last_seal_timestamp(tip->hash, n.identity.ivtp_id);
    PodProof pod;
    for (const DrivingBeacon& b : n.beacon_history) {
        if (b.tick > since && b.tick <= tick_) {
            pod.claimed_score_m += b.distance_m;
            pod.beacons.push_back(b);
        }
    }

    auto sealed = try_build_block(tip->block.header, std::move(txs), n.identity, std::move(pod),
                                  tick_, params_, kSealHashBudget);
    if (!sealed) return; // hash budget spent, try again next round

    auto block = std::make_shared<const Block>(std::move(*sealed));
    log_.append(tick_, n.index, EventKind::BlockSealed, block->hash(),
                std::to_string(block->header.height));
    ExtendOutcome outcome = n.chain.extend(*block);
    assert(outcome.status == ExtendStatus::ExtendedTip);
    note_tip_change(n, outcome.report);
    flood_block(n.index, block);
}

void World::on_sync_timer(const SimEvent& ev) {
    Node& n = *nodes_[ev.target];
    SimEvent next;
    next.type = SimEvent::Type::SyncTimer;
    next.target = n.index;
    schedule(tick_ + kSyncIntervalTicks, std::move(next));

    if (n.chain.tip() == genesis_hash()) return;
    auto tip = std::make_shared<const Block>(n.chain.find(n.chain.tip())->block);
    flood_block(n.index, tip);
}

void World::on_block(const SimEvent& ev) {
    Node& n = *nodes_[ev.target];
    const std::shared_ptr<const Block>& block = ev.block;
    Hash32 hash = block->hash();

    if (n.adversary == AdversaryBehavior::TamperedBlockRelay) {
        if (!n.tampered_blocks.insert(hash).second) return;
        // Flipping a merkle root bit gives the forgery its own block hash
        // while guaranteeing the body no longer matches the header.
        Block mutated = *block;
        mutated.header.merkle_root[0] ^= 0x01;
        auto shared = std::make_shared<const Block>(std::move(mutated));
        log_.append(tick_, n.index, EventKind::TamperedRelay, shared->hash());
        flood_block(n.index, shared);
        return;
    }
    if (n.adversary != AdversaryBehavior::None) return;

    if (n.chain.contains(hash)) return; // gossip duplicate, quiet
    log_.append(tick_, n.index, EventKind::BlockDelivered, hash);

    ExtendOutcome outcome = n.chain.extend(*block);
    switch (outcome.status) {
    case ExtendStatus::Duplicate:
        break;
    case ExtendStatus::Orphaned: {
        log_.append(tick_, n.index, EventKind::BlockOrphaned, hash);
        std::uint64_t latency = 0;
        if (unicast_draw(n.index, ev.from, latency)) {
            SimEvent req;
            req.type = SimEvent::Type::DeliverGetBlocks;
            req.target = ev.from;
            req.from = n.index;
            req.ref = block->header.previous_hash;
            schedule(tick_ + latency, std::move(req));
        }
        break;
    }
    case ExtendStatus::Invalid:
        log_.append(tick_, n.index, EventKind::BlockRejected, hash,
                    outcome.verdict.describe());
        break;
    case ExtendStatus::ExtendedTip:
    case ExtendStatus::SideBranch:
    case ExtendStatus::Reorged:
        log_.append(tick_, n.index, EventKind::BlockAccepted, hash,
                    std::to_string(block->header.height));
        note_tip_change(n, outcome.report);
        flood_block(n.index, ev.block);
        break;
    }
}

void World::on_get_blocks(const SimEvent& ev) {
    Node& n = *nodes_[ev.target];
    if (n.adversary != AdversaryBehavior::None) return;
    auto batch = n.chain.ancestors(ev.ref, kGetBlocksBatch);
    for (const ChainStore::StoredBlock* sb : batch) {
        std::uint64_t latency = 0;
        if (!unicast_draw(n.index, ev.from, latency)) continue;
        SimEvent out;
        out.type = SimEvent::Type::DeliverBlock;
        out.target = ev.from;
        out.from = n.index;
        out.block = std::make_shared<const Block>(sb->block);
        schedule(tick_ + latency, std::move(out));
    }
}

void World::on_adversary_timer(const SimEvent& ev) {
    Node& n = *nodes_[ev.target];
    SimEvent next;
    next.type = SimEvent::Type::AdversaryTimer;
    next.target = n.index;
    schedule(tick_ + kAdversaryIntervalTicks, std::move(next));

    if (n.adversary == AdversaryBehavior::ReplayAttacker) {
        if (n.replay_pool.empty()) return;
        const SafetyMessage& msg = n.replay_pool[n.replay_cursor % n.replay_pool.size()];
        n.replay_cursor += 1;
        auto shared = std::make_shared<const SafetyMessage>(msg);
        log_.append(tick_, n.index, EventKind::ReplaySent, shared->digest());
        flood_message(n.index, shared);
        return;
    }

    if (n.adversary == AdversaryBehavior::ForgedIvtp) {
        n.forged_counter += 1;
        RoutePoint pos = n.position_at(tick_);
        SafetyMessage msg;
        msg.kind = SafetyKind::HazardAhead;
        msg.x_mm = std::llround(pos.x * 1000.0);
        msg.y_mm = std::llround(pos.y * 1000.0);
        msg.tick = tick_;
        msg.msg_nonce = n.forged_counter;
        if (n.forged_counter % 2 == 1 || vehicle_count_ == 0) {
            // Self-made "crypto number" nobody registered.
            msg.sender_ivtp_id = n.identity.ivtp_id;
        } else {
            // Impersonate a real vehicle; the signature cannot match.
            std::uint32_t victim =
                static_cast<std::uint32_t>((n.forged_counter / 2) % vehicle_count_);
            msg.sender_ivtp_id = nodes_[victim]->identity.ivtp_id;
        }
        msg.sign_with(n.identity.keys);
        auto shared = std::make_shared<const SafetyMessage>(msg);
        log_.append(tick_, n.index, EventKind::ForgedSent, shared->digest());
        archive_message(*shared);
        flood_message(n.index, shared);
    }
}

void World::note_tip_change(Node& n, const TipReport& report) {
    if (!report.tip_changed) return;
    const ChainStore::StoredBlock* tip = n.chain.find(report.new_tip);
    log_.append(tick_, n.index, EventKind::TipChanged, report.new_tip,
                std::to_string(tip->block.header.height));
    // Transactions of rolled-back blocks go back to the pool unless the
    // new branch already carries them.
    for (const Hash32& rolled : report.rolled_back) {
        const ChainStore::StoredBlock* sb = n.chain.find(rolled);
        if (sb == nullptr) continue;
        for (const Transaction& tx : sb->block.transactions)
            n.mempool.emplace(std::make_pair(tx.sender_ivtp_id, tx.nonce), tx);
    }
    prune_mempool(n);
}

void World::prune_mempool(Node& n) {
    const LedgerState& ledger = n.chain.tip_ledger();
    for (auto it = n.mempool.begin(); it != n.mempool.end();) {
        if (it->first.second <= ledger.nonce_watermark(it->first.first))
            it = n.mempool.erase(it);
        else
            ++it;
    }
}

} // namespace ivbc::sim
