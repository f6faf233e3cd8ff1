#pragma once

#include "ivbc/bytes.hpp"
#include "ivbc/hash.hpp"
#include "ivbc/identity.hpp"

#include <cstdint>

namespace ivbc::sim {

enum class SafetyKind : std::uint64_t {
    HazardAhead = 0,
    CongestionReport = 1,
    IntersectionCrossing = 2,
};

const char* safety_kind_name(SafetyKind k);
std::optional<SafetyKind> safety_kind_from_name(std::string_view name);

/// A signed V2V data-sharing event, stamped with the sender's IV-TP id.
/// Coordinates are planar millimeters so the canonical encoding stays
/// integer-exact.
struct SafetyMessage {
    Hash32 sender_ivtp_id{};
    SafetyKind kind = SafetyKind::HazardAhead;
    std::int64_t x_mm = 0;
    std::int64_t y_mm = 0;
    std::uint64_t tick = 0;
    std::uint64_t msg_nonce = 0; // never reused per sender
    Bytes signature;

    bool operator==(const SafetyMessage&) const = default;

    Bytes signing_bytes() const;
    Bytes encode() const;
    static SafetyMessage decode(std::span<const std::uint8_t> data);

    Hash32 digest() const { return double_sha256(encode()); }

    void sign_with(const KeyPair& keys);
    bool signature_valid(std::span<const std::uint8_t> public_key) const;
};

SafetyMessage make_safety_message(const VehicleIdentity& sender, SafetyKind kind,
                                  std::int64_t x_mm, std::int64_t y_mm, std::uint64_t tick,
                                  std::uint64_t msg_nonce);

} // namespace ivbc::sim
