#pragma once

#include "ivbc/bytes.hpp"
#include "ivbc/hash.hpp"
#include "ivbc/merkle.hpp"
#include "ivbc/params.hpp"
#include "ivbc/pod.hpp"
#include "ivbc/transaction.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace ivbc {

struct BlockHeader {
    std::uint64_t height = 0;
    Hash32 previous_hash{};   // all-zero for genesis
    Hash32 merkle_root{};
    std::uint64_t timestamp_ms = 0; // simulated clock, strictly > parent's
    std::uint64_t difficulty = 0;   // required leading zero bits of the block hash
    std::uint64_t nonce = 0;
    Hash32 sealer_ivtp_id{};
    Hash32 pod_digest{};

    bool operator==(const BlockHeader&) const = default;

    Bytes encode() const;
    static BlockHeader decode(std::span<const std::uint8_t> data);
    static BlockHeader decode_from(ByteReader& r);

    /// double_sha256 of the canonical header encoding.
    Hash32 hash() const;

    bool meets_difficulty() const;
};

struct Block {
    BlockHeader header;
    std::vector<Transaction> transactions; // non-empty
    PodProof pod;                          // committed by header.pod_digest

    bool operator==(const Block&) const = default;

    Bytes encode() const;
    static Block decode(std::span<const std::uint8_t> data);

    Hash32 hash() const { return header.hash(); }

    /// Merkle root over the canonical transaction encodings, in body order.
    Hash32 body_merkle_root() const;
};

/// Shared constant chain origin: height 0, zero previous hash, one data
/// share carrying the digest of "genesis", difficulty 0, timestamp 0.
const Block& genesis_block();
const Hash32& genesis_hash();

struct NoValidTransactions : std::invalid_argument {
    NoValidTransactions() : std::invalid_argument("a block must carry at least one transaction") {}
};

struct PodInvalid : std::invalid_argument {
    explicit PodInvalid(PodError e);
    PodError error;
};

struct NonceExhausted : std::runtime_error {
    NonceExhausted() : std::runtime_error("no nonce satisfies the difficulty target") {}
};

/// Assembles and seals a block on top of parent. The puzzle nonce is
/// searched exhaustively from 0 upward; max_tries bounds the search so a
/// simulated miner can spend a fixed hash budget per attempt (nullopt on
/// exhaustion of a bounded budget, NonceExhausted if the full 64-bit
/// space is exhausted).
std::optional<Block> try_build_block(const BlockHeader& parent, std::vector<Transaction> txs,
                                     const VehicleIdentity& sealer, PodProof pod,
                                     std::uint64_t clock_ms, const ChainParams& params,
                                     std::uint64_t max_tries);

/// Unbounded variant; always returns a sealed block or throws.
Block build_block(const BlockHeader& parent, std::vector<Transaction> txs,
                  const VehicleIdentity& sealer, PodProof pod, std::uint64_t clock_ms,
                  const ChainParams& params);

} // namespace ivbc
