#include "ivbc/sim/message.hpp"

namespace ivbc::sim {

const char* safety_kind_name(SafetyKind k) {
    switch (k) {
    case SafetyKind::HazardAhead: return "HazardAhead";
    case SafetyKind::CongestionReport: return "CongestionReport";
    case SafetyKind::IntersectionCrossing: return "IntersectionCrossing";
    }
    return "Unknown";
}

std::optional<SafetyKind> safety_kind_from_name(std::string_view name) {
    if (name == "HazardAhead") return SafetyKind::HazardAhead;
    if (name == "CongestionReport") return SafetyKind::CongestionReport;
    if (name == "IntersectionCrossing") return SafetyKind::IntersectionCrossing;
    return std::nullopt;
}

namespace {
void encode_body(ByteWriter& w, const SafetyMessage& m) {
    w.hash(m.sender_ivtp_id);
    w.u64(static_cast<std::uint64_t>(m.kind));
    w.i64(m.x_mm);
    w.i64(m.y_mm);
    w.u64(m.tick);
    w.u64(m.msg_nonce);
}
} // namespace

Bytes SafetyMessage::signing_bytes() const {
    ByteWriter w;
    encode_body(w, *this);
    return w.take();
}

Bytes SafetyMessage::encode() const {
    ByteWriter w;
    encode_body(w, *this);
    w.var_bytes(signature);
    return w.take();
}

SafetyMessage SafetyMessage::decode(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    SafetyMessage m;
    m.sender_ivtp_id = r.hash();
    std::uint64_t kind = r.u64();
    if (kind > static_cast<std::uint64_t>(SafetyKind::IntersectionCrossing))
        throw DecodeError("unknown safety message kind");
    m.kind = static_cast<SafetyKind>(kind);
    m.x_mm = r.i64();
    m.y_mm = r.i64();
    m.tick = r.u64();
    m.msg_nonce = r.u64();
    m.signature = r.var_bytes();
    r.expect_done();
    return m;
}

void SafetyMessage::sign_with(const KeyPair& keys) {
    signature = sign(keys.secret, signing_bytes());
}

bool SafetyMessage::signature_valid(std::span<const std::uint8_t> public_key) const {
    return verify(public_key, signing_bytes(), signature);
}

SafetyMessage make_safety_message(const VehicleIdentity& sender, SafetyKind kind,
                                  std::int64_t x_mm, std::int64_t y_mm, std::uint64_t tick,
                                  std::uint64_t msg_nonce) {
    SafetyMessage m;
    m.sender_ivtp_id = sender.ivtp_id;
    m.kind = kind;
    m.x_mm = x_mm;
    m.y_mm = y_mm;
    m.tick = tick;
    m.msg_nonce = msg_nonce;
    m.sign_with(sender.keys);
    return m;
}

} // namespace ivbc::sim
