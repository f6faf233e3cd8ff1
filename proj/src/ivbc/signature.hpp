#pragma once

#include "ivbc/hash.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>

namespace ivbc {

// Ed25519 (deterministic, fixed-size keys and signatures).

inline constexpr std::size_t kPublicKeySize = 32;
inline constexpr std::size_t kSecretKeySize = 64;
inline constexpr std::size_t kSignatureSize = 64;
inline constexpr std::size_t kKeySeedSize = 32;

struct MalformedKey : std::invalid_argument {
    MalformedKey() : std::invalid_argument("malformed key") {}
};

struct KeyPair {
    Bytes secret; // kSecretKeySize bytes
    Bytes public_key; // kPublicKeySize bytes
};

/// Deterministic keypair from a 32-byte seed.
KeyPair keygen(const Hash32& seed);

/// Derives a per-entity key seed from a run seed and a stable label.
Hash32 derive_key_seed(std::uint64_t run_seed, std::uint64_t index, std::string_view label);

/// Deterministic signature over message. Throws MalformedKey on a bad secret.
Bytes sign(std::span<const std::uint8_t> secret, std::span<const std::uint8_t> message);

/// True exactly for untampered (public, message, signature) triples.
/// Malformed keys or signatures verify as false.
bool verify(std::span<const std::uint8_t> public_key,
            std::span<const std::uint8_t> message,
            std::span<const std::uint8_t> signature);

} // namespace ivbc
