#include "ivbc/pod.hpp"

#include "ivbc/block.hpp"

#include <bit>
#include <stdexcept>

namespace ivbc {

Bytes DrivingBeacon::signing_bytes() const {
    ByteWriter w;
    w.hash(vehicle_ivtp_id);
    w.u64(tick);
    w.u64(distance_m);
    return w.take();
}

Bytes DrivingBeacon::encode() const {
    ByteWriter w;
    w.hash(vehicle_ivtp_id);
    w.u64(tick);
    w.u64(distance_m);
    w.var_bytes(signature);
    return w.take();
}

DrivingBeacon DrivingBeacon::decode_from(ByteReader& r) {
    DrivingBeacon b;
    b.vehicle_ivtp_id = r.hash();
    b.tick = r.u64();
    b.distance_m = r.u64();
    b.signature = r.var_bytes();
    return b;
}

void DrivingBeacon::sign_with(const KeyPair& keys) {
    signature = sign(keys.secret, signing_bytes());
}

bool DrivingBeacon::signature_valid(std::span<const std::uint8_t> public_key) const {
    return verify(public_key, signing_bytes(), signature);
}

DrivingBeacon make_beacon(const VehicleIdentity& vehicle, std::uint64_t tick,
                          std::uint64_t distance_m) {
    DrivingBeacon b;
    b.vehicle_ivtp_id = vehicle.ivtp_id;
    b.tick = tick;
    b.distance_m = distance_m;
    b.sign_with(vehicle.keys);
    return b;
}

const char* pod_error_name(PodError e) {
    switch (e) {
    case PodError::BadBeaconSignature: return "BadBeaconSignature";
    case PodError::NonMonotonicTick: return "NonMonotonicTick";
    case PodError::WrongVehicle: return "WrongVehicle";
    case PodError::BeaconTooOld: return "BeaconTooOld";
    case PodError::BeaconFromFuture: return "BeaconFromFuture";
    case PodError::ScoreMismatch: return "ScoreMismatch";
    case PodError::DigestMismatch: return "DigestMismatch";
    case PodError::DifficultyMismatch: return "DifficultyMismatch";
    case PodError::TargetMissed: return "TargetMissed";
    }
    return "Unknown";
}

std::optional<PodError> accumulate(DrivingScore& score, const DrivingBeacon& beacon,
                                   std::span<const std::uint8_t> public_key) {
    if (!beacon.signature_valid(public_key)) return PodError::BadBeaconSignature;
    if (beacon.vehicle_ivtp_id != score.vehicle_ivtp_id) return PodError::WrongVehicle;
    // last_tick starts at 0 (genesis time), so tick-0 beacons never count.
    if (beacon.tick <= score.last_tick) return PodError::NonMonotonicTick;
    score.accumulated_m += beacon.distance_m;
    score.last_tick = beacon.tick;
    return std::nullopt;
}

std::uint32_t effective_difficulty(std::uint32_t base_difficulty, std::uint64_t accumulated_m,
                                   std::uint64_t unit_m) {
    if (base_difficulty < 1) throw std::invalid_argument("base_difficulty must be >= 1");
    if (unit_m < 1) throw std::invalid_argument("unit_m must be >= 1");
    // floor(log2(1 + m/u)) over the reals equals bit_width(1 + m div u) - 1,
    // since the bracketing power of two is an integer.
    std::uint64_t folded = 1 + accumulated_m / unit_m;
    auto discount = static_cast<std::uint32_t>(std::bit_width(folded) - 1);
    if (discount >= base_difficulty) return 1;
    std::uint32_t d = base_difficulty - discount;
    return d < 1 ? 1u : d;
}

Bytes PodProof::encode() const {
    ByteWriter w;
    w.u64(beacons.size());
    for (const DrivingBeacon& b : beacons) w.var_bytes(b.encode());
    w.u64(claimed_score_m);
    return w.take();
}

PodProof PodProof::decode(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    PodProof p = decode_from(r);
    r.expect_done();
    return p;
}

PodProof PodProof::decode_from(ByteReader& r) {
    PodProof p;
    std::uint64_t n = r.u64();
    if (n > r.remaining() / 4) throw DecodeError("beacon count exceeds record");
    p.beacons.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        Bytes raw = r.var_bytes();
        ByteReader br(raw);
        p.beacons.push_back(DrivingBeacon::decode_from(br));
        br.expect_done();
    }
    p.claimed_score_m = r.u64();
    return p;
}

Hash32 pod_beacons_digest(std::span<const DrivingBeacon> beacons) {
    ByteWriter w;
    w.u64(beacons.size());
    for (const DrivingBeacon& b : beacons) w.var_bytes(b.encode());
    return double_sha256(w.bytes());
}

Hash32 PodProof::digest() const {
    return pod_beacons_digest(beacons);
}

std::optional<PodError> verify_pod(const BlockHeader& header, const PodProof& proof,
                                   const IdentityRegistry& registry,
                                   std::uint64_t sealer_last_seal_tick,
                                   std::uint32_t base_difficulty, std::uint64_t unit_m) {
    const IdentityRegistry::Entry* sealer = registry.find(header.sealer_ivtp_id);
    if (sealer == nullptr) return PodError::WrongVehicle;

    std::uint64_t sum = 0;
    std::uint64_t prev_tick = sealer_last_seal_tick;
    bool first = true;
    for (const DrivingBeacon& b : proof.beacons) {
        if (b.vehicle_ivtp_id != header.sealer_ivtp_id) return PodError::WrongVehicle;
        if (!b.signature_valid(sealer->public_key)) return PodError::BadBeaconSignature;
        // Beacons at or before the sealer's previous block are spent.
        if (b.tick <= sealer_last_seal_tick) return PodError::BeaconTooOld;
        if (!first && b.tick <= prev_tick) return PodError::NonMonotonicTick;
        if (b.tick > header.timestamp_ms) return PodError::BeaconFromFuture;
        sum += b.distance_m;
        prev_tick = b.tick;
        first = false;
    }
    if (sum != proof.claimed_score_m) return PodError::ScoreMismatch;
    if (proof.digest() != header.pod_digest) return PodError::DigestMismatch;

    std::uint32_t want = effective_difficulty(base_difficulty, proof.claimed_score_m, unit_m);
    if (header.difficulty != want) return PodError::DifficultyMismatch;
    if (!header.meets_difficulty()) return PodError::TargetMissed;
    return std::nullopt;
}

} // namespace ivbc
