#pragma once

#include "ivbc/hash.hpp"
#include "ivbc/signature.hpp"

#include <map>
#include <optional>
#include <string>

namespace ivbc {

/// A vehicle's on-network identity. The IV-TP id is the unique crypto
/// number stamped on every message and transaction; it is derived from
/// the public key, so distinct keys yield distinct ids.
struct VehicleIdentity {
    KeyPair keys;
    Hash32 ivtp_id{};
    std::string label; // simulation-only, human readable

    static VehicleIdentity from_keys(KeyPair kp, std::string label);
    static VehicleIdentity from_seed(const Hash32& seed, std::string label);
};

Hash32 ivtp_id_from_public_key(std::span<const std::uint8_t> public_key);

/// Public half of every registered vehicle, keyed by IV-TP id.
/// Fixed at genesis provisioning; validators use it to resolve keys.
class IdentityRegistry {
public:
    struct Entry {
        Bytes public_key;
        std::string label;
    };

    /// False if the id is already registered.
    bool add(const Hash32& ivtp_id, Bytes public_key, std::string label);

    const Entry* find(const Hash32& ivtp_id) const;
    bool contains(const Hash32& ivtp_id) const { return find(ivtp_id) != nullptr; }
    std::size_t size() const { return entries_.size(); }

    const std::map<Hash32, Entry>& entries() const { return entries_; }

private:
    std::map<Hash32, Entry> entries_;
};

} // namespace ivbc
