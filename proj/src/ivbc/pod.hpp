#pragma once

#include "ivbc/bytes.hpp"
#include "ivbc/hash.hpp"
#include "ivbc/identity.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ivbc {

struct BlockHeader;

/// Self-signed driving-activity evidence. A vehicle emits one beacon per
/// reporting interval covering the meters traveled since the last one.
struct DrivingBeacon {
    Hash32 vehicle_ivtp_id{};
    std::uint64_t tick = 0;       // strictly increasing per vehicle
    std::uint64_t distance_m = 0; // meters since previous beacon
    Bytes signature;

    bool operator==(const DrivingBeacon&) const = default;

    Bytes signing_bytes() const;
    Bytes encode() const;
    static DrivingBeacon decode_from(ByteReader& r);

    void sign_with(const KeyPair& keys);
    bool signature_valid(std::span<const std::uint8_t> public_key) const;
};

DrivingBeacon make_beacon(const VehicleIdentity& vehicle, std::uint64_t tick,
                          std::uint64_t distance_m);

/// Meters accumulated since the vehicle last sealed a block.
struct DrivingScore {
    Hash32 vehicle_ivtp_id{};
    std::uint64_t accumulated_m = 0;
    std::uint64_t last_tick = 0; // tick of the newest beacon folded in

    void reset_on_seal(std::uint64_t seal_tick) {
        accumulated_m = 0;
        last_tick = seal_tick;
    }
};

enum class PodError : std::uint8_t {
    BadBeaconSignature,
    NonMonotonicTick,
    WrongVehicle,
    BeaconTooOld,
    BeaconFromFuture,
    ScoreMismatch,
    DigestMismatch,
    DifficultyMismatch,
    TargetMissed,
};

const char* pod_error_name(PodError e);

/// Folds a beacon into the score. On error the score is untouched.
std::optional<PodError> accumulate(DrivingScore& score, const DrivingBeacon& beacon,
                                   std::span<const std::uint8_t> public_key);

/// Puzzle difficulty after the driving discount:
///   max(1, base - floor(log2(1 + accumulated_m / unit_m)))
/// computed in exact integer arithmetic. More driving, easier puzzle,
/// never below one bit.
std::uint32_t effective_difficulty(std::uint32_t base_difficulty, std::uint64_t accumulated_m,
                                   std::uint64_t unit_m);

/// Driving evidence shipped with a block. The header commits to it via
/// pod_digest; the puzzle nonce itself sits in the header.
struct PodProof {
    std::vector<DrivingBeacon> beacons;
    std::uint64_t claimed_score_m = 0;

    bool operator==(const PodProof&) const = default;

    Bytes encode() const;
    static PodProof decode(std::span<const std::uint8_t> data);
    static PodProof decode_from(ByteReader& r);

    /// double_sha256 over the canonical beacon list.
    Hash32 digest() const;
};

Hash32 pod_beacons_digest(std::span<const DrivingBeacon> beacons);

/// Full PoD check for a sealed block: every beacon signed by the sealer,
/// ticks strictly increasing, all newer than the sealer's previous seal
/// and not past the block timestamp, distances summing to the claimed
/// score, header committing to the beacons, and the block hash meeting
/// the discounted difficulty.
std::optional<PodError> verify_pod(const BlockHeader& header, const PodProof& proof,
                                   const IdentityRegistry& registry,
                                   std::uint64_t sealer_last_seal_tick,
                                   std::uint32_t base_difficulty, std::uint64_t unit_m);

} // namespace ivbc
