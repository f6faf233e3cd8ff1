#include "ivbc/merkle.hpp"

namespace ivbc {

namespace {

Hash32 parent_hash(const Hash32& left, const Hash32& right) {
    std::uint8_t buf[64];
    std::copy(left.begin(), left.end(), buf);
    std::copy(right.begin(), right.end(), buf + 32);
    return double_sha256(std::span<const std::uint8_t>(buf, sizeof(buf)));
}

} // namespace

MerkleTree MerkleTree::from_payloads(std::span<const Bytes> payloads) {
    if (payloads.empty()) throw EmptyLeafSet();
    std::vector<Hash32> leaves;
    leaves.reserve(payloads.size());
    for (const Bytes& p : payloads) leaves.push_back(double_sha256(p));
    return from_leaf_hashes(std::move(leaves));
}

MerkleTree MerkleTree::from_leaf_hashes(std::vector<Hash32> leaves) {
    if (leaves.empty()) throw EmptyLeafSet();
    MerkleTree tree;
    tree.levels_.push_back(std::move(leaves));
    while (tree.levels_.back().size() > 1) {
        const auto& level = tree.levels_.back();
        std::vector<Hash32> next;
        next.reserve((level.size() + 1) / 2);
        for (std::size_t i = 0; i < level.size(); i += 2) {
            const Hash32& left = level[i];
            const Hash32& right = (i + 1 < level.size()) ? level[i + 1] : level[i];
            next.push_back(parent_hash(left, right));
        }
        tree.levels_.push_back(std::move(next));
    }
    return tree;
}

MerkleProof MerkleTree::proof(std::size_t leaf_index) const {
    if (leaf_index >= leaf_count()) throw IndexOutOfRange();
    MerkleProof out;
    std::size_t idx = leaf_index;
    for (std::size_t depth = 0; depth + 1 < levels_.size(); ++depth) {
        const auto& level = levels_[depth];
        if (idx % 2 == 0) {
            // Sibling to the right; an odd level duplicates the last node.
            std::size_t sib = (idx + 1 < level.size()) ? idx + 1 : idx;
            out.push_back({level[sib], Side::Right});
        } else {
            out.push_back({level[idx - 1], Side::Left});
        }
        idx /= 2;
    }
    return out;
}

Hash32 merkle_root(std::span<const Bytes> leaf_payloads) {
    return MerkleTree::from_payloads(leaf_payloads).root();
}

bool verify_merkle_proof(const Hash32& leaf_hash, const MerkleProof& proof, const Hash32& root) {
    Hash32 node = leaf_hash;
    for (const ProofStep& step : proof) {
        node = (step.side == Side::Right) ? parent_hash(node, step.sibling)
                                          : parent_hash(step.sibling, node);
    }
    return node == root;
}

} // namespace ivbc
