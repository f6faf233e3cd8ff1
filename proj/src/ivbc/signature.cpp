#include "ivbc/signature.hpp"

#include "ivbc/bytes.hpp"

#include <sodium.h>

#include <mutex>

namespace ivbc {

namespace {
void ensure_sodium() {
    static std::once_flag flag;
    std::call_once(flag, [] {
        if (sodium_init() < 0) throw std::runtime_error("sodium_init failed");
    });
}
} // namespace

KeyPair keygen(const Hash32& seed) {
    ensure_sodium();
    static_assert(kKeySeedSize == crypto_sign_SEEDBYTES);
    KeyPair kp;
    kp.public_key.resize(crypto_sign_PUBLICKEYBYTES);
    kp.secret.resize(crypto_sign_SECRETKEYBYTES);
    crypto_sign_seed_keypair(kp.public_key.data(), kp.secret.data(), seed.data());
    return kp;
}

Hash32 derive_key_seed(std::uint64_t run_seed, std::uint64_t index, std::string_view label) {
    ByteWriter w;
    w.u64(run_seed);
    w.u64(index);
    w.var_bytes(std::string(label));
    return double_sha256(w.bytes());
}

Bytes sign(std::span<const std::uint8_t> secret, std::span<const std::uint8_t> message) {
    ensure_sodium();
    if (secret.size() != kSecretKeySize) throw MalformedKey();
    Bytes sig(crypto_sign_BYTES);
    crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), secret.data());
    return sig;
}

bool verify(std::span<const std::uint8_t> public_key,
            std::span<const std::uint8_t> message,
            std::span<const std::uint8_t> signature) {
    ensure_sodium();
    if (public_key.size() != kPublicKeySize || signature.size() != kSignatureSize) return false;
    return crypto_sign_verify_detached(signature.data(), message.data(), message.size(),
                                       public_key.data()) == 0;
}

} // namespace ivbc
