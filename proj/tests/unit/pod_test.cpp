#include "ivbc/block.hpp"
#include "ivbc/pod.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

using namespace ivbc;

namespace {

VehicleIdentity driver(std::uint64_t n) {
    return VehicleIdentity::from_seed(double_sha256("pod-" + std::to_string(n)),
                                      "d" + std::to_string(n));
}

/// Independent route: largest k with unit*(2^k - 1) <= meters.
std::uint32_t oracle_effective_difficulty(std::uint32_t base, std::uint64_t m, std::uint64_t unit) {
    std::uint32_t k = 0;
    while (k < 64) {
        // 1 + m/unit >= 2^(k+1)  <=>  unit + m >= unit * 2^(k+1)
        long double lhs = static_cast<long double>(unit) + static_cast<long double>(m);
        long double rhs = static_cast<long double>(unit) * std::pow(2.0L, k + 1);
        if (lhs >= rhs) ++k;
        else break;
    }
    if (k >= base) return 1;
    std::uint32_t d = base - k;
    return d < 1 ? 1 : d;
}

} // namespace

TEST_CASE("accumulate adds beacon distance, zero distance is legal idling") {
    VehicleIdentity v = driver(1);
    DrivingScore score;
    score.vehicle_ivtp_id = v.ivtp_id;

    CHECK_FALSE(accumulate(score, make_beacon(v, 10, 120), v.keys.public_key));
    CHECK(score.accumulated_m == 120);

    CHECK_FALSE(accumulate(score, make_beacon(v, 20, 0), v.keys.public_key));
    CHECK(score.accumulated_m == 120);
}

TEST_CASE("accumulate rejects reused ticks and bad signatures, untouched on error") {
    VehicleIdentity v = driver(2);
    DrivingScore score;
    score.vehicle_ivtp_id = v.ivtp_id;
    REQUIRE_FALSE(accumulate(score, make_beacon(v, 10, 50), v.keys.public_key));

    auto replay = accumulate(score, make_beacon(v, 10, 50), v.keys.public_key);
    REQUIRE(replay.has_value());
    CHECK(*replay == PodError::NonMonotonicTick);
    CHECK(score.accumulated_m == 50);

    DrivingBeacon forged = make_beacon(v, 30, 10);
    forged.distance_m = 9999; // signature no longer covers the fields
    auto bad = accumulate(score, forged, v.keys.public_key);
    REQUIRE(bad.has_value());
    CHECK(*bad == PodError::BadBeaconSignature);
    CHECK(score.accumulated_m == 50);
    CHECK(score.last_tick == 10);
}

TEST_CASE("effective difficulty follows the discount formula") {
    CHECK(effective_difficulty(12, 0, 1000) == 12);
    CHECK(effective_difficulty(12, 1000, 1000) == 11);
    CHECK(effective_difficulty(12, 7000, 1000) == 9); // floor(log2(8)) = 3
    CHECK(effective_difficulty(4, 1u << 20, 1) == 1); // floors at one bit
    CHECK_THROWS_AS(effective_difficulty(0, 10, 1000), std::invalid_argument);
    CHECK_THROWS_AS(effective_difficulty(8, 10, 0), std::invalid_argument);
}

TEST_CASE("effective difficulty matches an independent evaluation on a grid") {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 1000; ++i) {
        std::uint32_t base = 1 + rng() % 24;
        std::uint64_t unit = 1 + rng() % 5000;
        std::uint64_t m = rng() % (1u << 24);
        CHECK(effective_difficulty(base, m, unit) == oracle_effective_difficulty(base, m, unit));
    }
}

TEST_CASE("effective difficulty is non-increasing in accumulated meters, never below 1") {
    std::uint32_t prev = effective_difficulty(10, 0, 500);
    for (std::uint64_t m = 0; m < 2000000; m += 977) {
        std::uint32_t d = effective_difficulty(10, m, 500);
        CHECK(d <= prev);
        CHECK(d >= 1);
        prev = d;
    }
}

namespace {

/// Seals a block over the proof so header-level pod checks can run.
Block sealed_with(const VehicleIdentity& sealer, PodProof pod, std::uint64_t clock,
                  const ChainParams& params) {
    Transaction tx = make_data_share(sealer, double_sha256("payload"), {}, 1);
    return build_block(genesis_block().header, {tx}, sealer, std::move(pod), clock, params);
}

} // namespace

TEST_CASE("verify_pod accepts an honest proof") {
    VehicleIdentity v = driver(3);
    IdentityRegistry reg;
    reg.add(v.ivtp_id, v.keys.public_key, v.label);
    ChainParams params{4, 1000, 1, 100};

    PodProof pod;
    pod.beacons = {make_beacon(v, 100, 600), make_beacon(v, 200, 500)};
    pod.claimed_score_m = 1100;
    Block b = sealed_with(v, pod, 300, params);
    CHECK(b.header.difficulty == effective_difficulty(4, 1100, 1000));
    CHECK_FALSE(verify_pod(b.header, b.pod, reg, 0, params.base_difficulty, params.unit_m));
}

TEST_CASE("verify_pod rejects foreign beacons, inflation and spent beacons") {
    VehicleIdentity v = driver(4);
    VehicleIdentity other = driver(5);
    IdentityRegistry reg;
    reg.add(v.ivtp_id, v.keys.public_key, v.label);
    reg.add(other.ivtp_id, other.keys.public_key, other.label);
    ChainParams params{4, 1000, 1, 100};

    PodProof honest;
    honest.beacons = {make_beacon(v, 100, 600)};
    honest.claimed_score_m = 600;
    Block b = sealed_with(v, honest, 300, params);

    SUBCASE("beacon signed by another vehicle") {
        Block bad = b;
        bad.pod.beacons[0] = make_beacon(other, 100, 600);
        auto err = verify_pod(bad.header, bad.pod, reg, 0, 4, 1000);
        REQUIRE(err.has_value());
        CHECK(*err == PodError::WrongVehicle);
    }
    SUBCASE("claimed score inflated by one meter") {
        Block bad = b;
        bad.pod.claimed_score_m += 1;
        auto err = verify_pod(bad.header, bad.pod, reg, 0, 4, 1000);
        REQUIRE(err.has_value());
        CHECK(*err == PodError::ScoreMismatch);
    }
    SUBCASE("beacons at or before the previous seal are spent") {
        auto err = verify_pod(b.header, b.pod, reg, 150, 4, 1000);
        REQUIRE(err.has_value());
        CHECK(*err == PodError::BeaconTooOld);
    }
    SUBCASE("proof beacons not covered by the header digest") {
        Block bad = b;
        bad.pod.beacons[0] = make_beacon(v, 120, 600);
        auto err = verify_pod(bad.header, bad.pod, reg, 0, 4, 1000);
        REQUIRE(err.has_value());
        CHECK(*err == PodError::DigestMismatch);
    }
    SUBCASE("difficulty must equal the discounted value") {
        Block bad = b;
        bad.header.difficulty += 1;
        auto err = verify_pod(bad.header, bad.pod, reg, 0, 4, 1000);
        REQUIRE(err.has_value());
        CHECK(*err == PodError::DifficultyMismatch);
    }
}

TEST_CASE("two validators agree on verify_pod for identical inputs") {
    VehicleIdentity v = driver(6);
    IdentityRegistry reg_a, reg_b;
    reg_a.add(v.ivtp_id, v.keys.public_key, v.label);
    reg_b.add(v.ivtp_id, v.keys.public_key, v.label);
    ChainParams params{3, 1000, 1, 100};

    PodProof pod;
    pod.beacons = {make_beacon(v, 50, 300)};
    pod.claimed_score_m = 300;
    Block b = sealed_with(v, pod, 90, params);
    CHECK(verify_pod(b.header, b.pod, reg_a, 0, 3, 1000) ==
          verify_pod(b.header, b.pod, reg_b, 0, 3, 1000));
}
