#pragma once

#include "ivbc/hash.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ivbc {

// Canonical wire rules, shared by every hashed or signed structure:
//   - unsigned integers: 8-byte big-endian
//   - signed integers: 8-byte big-endian two's complement
//   - hashes: raw 32 bytes
//   - variable byte strings: 4-byte big-endian length prefix, then bytes
//   - list counts: 8-byte big-endian, then elements in order
// Field order is fixed per structure; the encoding is injective over the
// field domain.

class ByteWriter {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }

    void u64(std::uint64_t v) {
        for (int i = 7; i >= 0; --i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }

    void hash(const Hash32& h) { out_.insert(out_.end(), h.begin(), h.end()); }

    void var_bytes(std::span<const std::uint8_t> data) {
        if (data.size() > 0xffffffffull) throw std::length_error("var_bytes too long");
        auto n = static_cast<std::uint32_t>(data.size());
        for (int i = 3; i >= 0; --i) out_.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
        out_.insert(out_.end(), data.begin(), data.end());
    }

    void var_bytes(const std::string& s) { var_bytes(as_bytes(s)); }

    const Bytes& bytes() const { return out_; }
    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
};

/// Thrown when a byte stream does not decode as a canonical record.
struct DecodeError : std::runtime_error {
    explicit DecodeError(const std::string& what) : std::runtime_error(what) {}
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t u8() {
        need(1);
        return data_[pos_++];
    }

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_++];
        return v;
    }

    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }

    Hash32 hash() {
        need(32);
        Hash32 h;
        std::copy(data_.begin() + pos_, data_.begin() + pos_ + 32, h.begin());
        pos_ += 32;
        return h;
    }

    Bytes var_bytes() {
        need(4);
        std::uint32_t n = 0;
        for (int i = 0; i < 4; ++i) n = (n << 8) | data_[pos_++];
        need(n);
        Bytes out(data_.begin() + pos_, data_.begin() + pos_ + n);
        pos_ += n;
        return out;
    }

    bool done() const { return pos_ == data_.size(); }
    std::size_t remaining() const { return data_.size() - pos_; }

    /// Decoders call this last so trailing garbage never round-trips.
    void expect_done() const {
        if (!done()) throw DecodeError("trailing bytes after record");
    }

private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n) throw DecodeError("truncated record");
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

} // namespace ivbc
