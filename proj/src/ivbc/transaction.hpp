#pragma once

#include "ivbc/bytes.hpp"
#include "ivbc/hash.hpp"
#include "ivbc/identity.hpp"

#include <cstdint>
#include <vector>

namespace ivbc {

enum class TxKind : std::uint64_t {
    DataShare = 0,
    RewardTransfer = 1,
};

/// Payload of a DataShare transaction: the digest of the shared safety
/// message plus the vehicles that acknowledged receipt. The benefiters
/// each owe the sealer one reward when the block seals.
struct DataSharePayload {
    Hash32 message_digest{};
    std::vector<Hash32> benefiters;

    bool operator==(const DataSharePayload&) const = default;
};

struct RewardTransferPayload {
    Hash32 from{};
    Hash32 to{};
    std::uint64_t amount = 0;

    bool operator==(const RewardTransferPayload&) const = default;
};

struct Transaction {
    TxKind kind = TxKind::DataShare;
    Hash32 sender_ivtp_id{};
    DataSharePayload data_share;       // valid when kind == DataShare
    RewardTransferPayload transfer;    // valid when kind == RewardTransfer
    std::uint64_t nonce = 0;           // strictly increasing per sender
    Bytes signature;

    bool operator==(const Transaction&) const = default;

    /// Canonical bytes the sender signs (everything but the signature).
    Bytes signing_bytes() const;

    /// Full canonical encoding, signature included. These bytes are the
    /// merkle leaf payload, so any field mutation moves the root.
    Bytes encode() const;
    static Transaction decode(std::span<const std::uint8_t> data);

    Hash32 txid() const { return double_sha256(encode()); }

    void sign_with(const KeyPair& keys);
    bool signature_valid(std::span<const std::uint8_t> public_key) const;
};

/// DataShare helper used by nodes turning an acknowledged message into a
/// chain transaction.
Transaction make_data_share(const VehicleIdentity& sender, const Hash32& message_digest,
                            std::vector<Hash32> benefiters, std::uint64_t nonce);

Transaction make_reward_transfer(const VehicleIdentity& sender, const Hash32& from,
                                 const Hash32& to, std::uint64_t amount, std::uint64_t nonce);

} // namespace ivbc
