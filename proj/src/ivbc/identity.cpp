#include "ivbc/identity.hpp"

namespace ivbc {

Hash32 ivtp_id_from_public_key(std::span<const std::uint8_t> public_key) {
    return double_sha256(public_key);
}

VehicleIdentity VehicleIdentity::from_keys(KeyPair kp, std::string label) {
    VehicleIdentity id;
    id.ivtp_id = ivtp_id_from_public_key(kp.public_key);
    id.keys = std::move(kp);
    id.label = std::move(label);
    return id;
}

VehicleIdentity VehicleIdentity::from_seed(const Hash32& seed, std::string label) {
    return from_keys(keygen(seed), std::move(label));
}

bool IdentityRegistry::add(const Hash32& ivtp_id, Bytes public_key, std::string label) {
    auto [it, inserted] = entries_.try_emplace(ivtp_id, Entry{std::move(public_key), std::move(label)});
    return inserted;
}

const IdentityRegistry::Entry* IdentityRegistry::find(const Hash32& ivtp_id) const {
    auto it = entries_.find(ivtp_id);
    return it == entries_.end() ? nullptr : &it->second;
}

} // namespace ivbc
