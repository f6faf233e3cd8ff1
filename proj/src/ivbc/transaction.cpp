#include "ivbc/transaction.hpp"

namespace ivbc {

namespace {

void encode_body(ByteWriter& w, const Transaction& tx) {
    w.u64(static_cast<std::uint64_t>(tx.kind));
    w.hash(tx.sender_ivtp_id);
    switch (tx.kind) {
    case TxKind::DataShare:
        w.hash(tx.data_share.message_digest);
        w.u64(tx.data_share.benefiters.size());
        for (const Hash32& b : tx.data_share.benefiters) w.hash(b);
        break;
    case TxKind::RewardTransfer:
        w.hash(tx.transfer.from);
        w.hash(tx.transfer.to);
        w.u64(tx.transfer.amount);
        break;
    }
    w.u64(tx.nonce);
}

} // namespace

Bytes Transaction::signing_bytes() const {
    ByteWriter w;
    encode_body(w, *this);
    return w.take();
}

Bytes Transaction::encode() const {
    ByteWriter w;
    encode_body(w, *this);
    w.var_bytes(signature);
    return w.take();
}

Transaction Transaction::decode(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    Transaction tx;
    std::uint64_t kind = r.u64();
    if (kind > static_cast<std::uint64_t>(TxKind::RewardTransfer))
        throw DecodeError("unknown transaction kind");
    tx.kind = static_cast<TxKind>(kind);
    tx.sender_ivtp_id = r.hash();
    if (tx.kind == TxKind::DataShare) {
        tx.data_share.message_digest = r.hash();
        std::uint64_t n = r.u64();
        if (n > r.remaining() / 32) throw DecodeError("benefiter count exceeds record");
        tx.data_share.benefiters.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) tx.data_share.benefiters.push_back(r.hash());
    } else {
        tx.transfer.from = r.hash();
        tx.transfer.to = r.hash();
        tx.transfer.amount = r.u64();
    }
    tx.nonce = r.u64();
    tx.signature = r.var_bytes();
    r.expect_done();
    return tx;
}

void Transaction::sign_with(const KeyPair& keys) {
    signature = sign(keys.secret, signing_bytes());
}

bool Transaction::signature_valid(std::span<const std::uint8_t> public_key) const {
    return verify(public_key, signing_bytes(), signature);
}

Transaction make_data_share(const VehicleIdentity& sender, const Hash32& message_digest,
                            std::vector<Hash32> benefiters, std::uint64_t nonce) {
    Transaction tx;
    tx.kind = TxKind::DataShare;
    tx.sender_ivtp_id = sender.ivtp_id;
    tx.data_share.message_digest = message_digest;
    tx.data_share.benefiters = std::move(benefiters);
    tx.nonce = nonce;
    tx.sign_with(sender.keys);
    return tx;
}

Transaction make_reward_transfer(const VehicleIdentity& sender, const Hash32& from,
                                 const Hash32& to, std::uint64_t amount, std::uint64_t nonce) {
    Transaction tx;
    tx.kind = TxKind::RewardTransfer;
    tx.sender_ivtp_id = sender.ivtp_id;
    tx.transfer = {from, to, amount};
    tx.nonce = nonce;
    tx.sign_with(sender.keys);
    return tx;
}

} // namespace ivbc
