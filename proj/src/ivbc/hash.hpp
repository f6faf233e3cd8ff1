#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ivbc {

/// 32-byte digest. Hex form is always lowercase, 64 chars, no prefix.
using Hash32 = std::array<std::uint8_t, 32>;

inline constexpr Hash32 kZeroHash{};

using Bytes = std::vector<std::uint8_t>;

/// Incremental SHA-256 (FIPS 180-4).
class Sha256 {
public:
    Sha256() { reset(); }

    void reset();
    void update(const void* data, std::size_t len);
    Hash32 finalize();

    static Hash32 digest(std::span<const std::uint8_t> data);

private:
    void compress(const std::uint8_t block[64]);

    std::uint32_t state_[8];
    std::uint8_t buf_[64];
    std::size_t buf_len_ = 0;
    std::uint64_t total_ = 0;
};

/// SHA-256 applied twice; the hash used everywhere in this project.
Hash32 double_sha256(std::span<const std::uint8_t> data);
Hash32 double_sha256(std::string_view data);

/// Number of leading zero bits of the digest, byte 0 MSB first.
unsigned leading_zero_bits(const Hash32& h);

std::string to_hex(const Hash32& h);
std::string to_hex(std::span<const std::uint8_t> data);

/// Parses a 64-char lowercase/uppercase hex string. Returns false on bad input.
bool hash_from_hex(std::string_view hex, Hash32& out);

inline std::span<const std::uint8_t> as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

} // namespace ivbc
