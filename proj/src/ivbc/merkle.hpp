#pragma once

#include "ivbc/hash.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace ivbc {

struct EmptyLeafSet : std::invalid_argument {
    EmptyLeafSet() : std::invalid_argument("merkle tree needs at least one leaf") {}
};

struct IndexOutOfRange : std::out_of_range {
    IndexOutOfRange() : std::out_of_range("merkle leaf index out of range") {}
};

/// Position of a proof sibling relative to the running hash.
enum class Side : std::uint8_t { Left = 0, Right = 1 };

struct ProofStep {
    Hash32 sibling{};
    Side side;

    bool operator==(const ProofStep&) const = default;
};

using MerkleProof = std::vector<ProofStep>;

/// Binary hash tree over double_sha256. Leaf and node hashing both use
/// double_sha256; a level with an odd node count duplicates its last node.
/// Leaf order is the transaction order in the block body.
class MerkleTree {
public:
    /// Builds from raw leaf payloads (hashes each with double_sha256).
    static MerkleTree from_payloads(std::span<const Bytes> payloads);

    /// Builds from already-hashed leaves.
    static MerkleTree from_leaf_hashes(std::vector<Hash32> leaves);

    const Hash32& root() const { return levels_.back().front(); }
    const std::vector<Hash32>& leaves() const { return levels_.front(); }
    std::size_t leaf_count() const { return levels_.front().size(); }

    /// Sibling path from leaf_index up to (excluding) the root.
    MerkleProof proof(std::size_t leaf_index) const;

private:
    // levels_[0] = leaves, levels_.back() = single root entry.
    std::vector<std::vector<Hash32>> levels_;
};

Hash32 merkle_root(std::span<const Bytes> leaf_payloads);

/// Folds leaf_hash through the proof; true iff the result equals root.
bool verify_merkle_proof(const Hash32& leaf_hash, const MerkleProof& proof, const Hash32& root);

} // namespace ivbc
