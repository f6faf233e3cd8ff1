#include "ivbc/block.hpp"

namespace ivbc {

Bytes BlockHeader::encode() const {
    ByteWriter w;
    w.u64(height);
    w.hash(previous_hash);
    w.hash(merkle_root);
    w.u64(timestamp_ms);
    w.u64(difficulty);
    w.u64(nonce);
    w.hash(sealer_ivtp_id);
    w.hash(pod_digest);
    return w.take();
}

BlockHeader BlockHeader::decode(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    BlockHeader h = decode_from(r);
    r.expect_done();
    return h;
}

BlockHeader BlockHeader::decode_from(ByteReader& r) {
    BlockHeader h;
    h.height = r.u64();
    h.previous_hash = r.hash();
    h.merkle_root = r.hash();
    h.timestamp_ms = r.u64();
    h.difficulty = r.u64();
    h.nonce = r.u64();
    h.sealer_ivtp_id = r.hash();
    h.pod_digest = r.hash();
    return h;
}

Hash32 BlockHeader::hash() const {
    return double_sha256(encode());
}

bool BlockHeader::meets_difficulty() const {
    return leading_zero_bits(hash()) >= difficulty;
}

Bytes Block::encode() const {
    ByteWriter w;
    Bytes hdr = header.encode();
    w.var_bytes(hdr);
    w.u64(transactions.size());
    for (const Transaction& tx : transactions) w.var_bytes(tx.encode());
    w.var_bytes(pod.encode());
    return w.take();
}

Block Block::decode(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    Block b;
    Bytes hdr = r.var_bytes();
    b.header = BlockHeader::decode(hdr);
    std::uint64_t n = r.u64();
    if (n > r.remaining() / 4) throw DecodeError("transaction count exceeds record");
    b.transactions.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        Bytes raw = r.var_bytes();
        b.transactions.push_back(Transaction::decode(raw));
    }
    Bytes pod_raw = r.var_bytes();
    b.pod = PodProof::decode(pod_raw);
    r.expect_done();
    return b;
}

Hash32 Block::body_merkle_root() const {
    std::vector<Bytes> payloads;
    payloads.reserve(transactions.size());
    for (const Transaction& tx : transactions) payloads.push_back(tx.encode());
    return merkle_root(payloads);
}

PodInvalid::PodInvalid(PodError e)
    : std::invalid_argument(std::string("invalid PoD proof: ") + pod_error_name(e)), error(e) {}

const Block& genesis_block() {
    static const Block genesis = [] {
        Block b;
        Transaction tx;
        tx.kind = TxKind::DataShare;
        tx.sender_ivtp_id = kZeroHash;
        tx.data_share.message_digest = double_sha256(std::string_view("genesis"));
        tx.nonce = 0;
        b.transactions.push_back(std::move(tx));

        b.pod = PodProof{};
        b.header.height = 0;
        b.header.previous_hash = kZeroHash;
        b.header.merkle_root = b.body_merkle_root();
        b.header.timestamp_ms = 0;
        b.header.difficulty = 0;
        b.header.nonce = 0;
        b.header.sealer_ivtp_id = kZeroHash;
        b.header.pod_digest = b.pod.digest();
        return b;
    }();
    return genesis;
}

const Hash32& genesis_hash() {
    static const Hash32 h = genesis_block().hash();
    return h;
}

namespace {

// Local sanity checks on a proof before sealing; chain-context rules
// (spent beacons) are the validator's job.
std::optional<PodError> check_pod_shape(const PodProof& pod, const VehicleIdentity& sealer) {
    std::uint64_t sum = 0;
    std::uint64_t prev_tick = 0;
    bool first = true;
    for (const DrivingBeacon& b : pod.beacons) {
        if (b.vehicle_ivtp_id != sealer.ivtp_id) return PodError::WrongVehicle;
        if (!b.signature_valid(sealer.keys.public_key)) return PodError::BadBeaconSignature;
        if (!first && b.tick <= prev_tick) return PodError::NonMonotonicTick;
        sum += b.distance_m;
        prev_tick = b.tick;
        first = false;
    }
    if (sum != pod.claimed_score_m) return PodError::ScoreMismatch;
    return std::nullopt;
}

} // namespace

std::optional<Block> try_build_block(const BlockHeader& parent, std::vector<Transaction> txs,
                                     const VehicleIdentity& sealer, PodProof pod,
                                     std::uint64_t clock_ms, const ChainParams& params,
                                     std::uint64_t max_tries) {
    if (txs.empty()) throw NoValidTransactions();
    if (auto err = check_pod_shape(pod, sealer)) throw PodInvalid(*err);

    Block b;
    b.transactions = std::move(txs);
    b.pod = std::move(pod);
    b.header.height = parent.height + 1;
    b.header.previous_hash = parent.hash();
    b.header.merkle_root = b.body_merkle_root();
    b.header.timestamp_ms = std::max(clock_ms, parent.timestamp_ms + 1);
    b.header.difficulty =
        effective_difficulty(params.base_difficulty, b.pod.claimed_score_m, params.unit_m);
    b.header.sealer_ivtp_id = sealer.ivtp_id;
    b.header.pod_digest = b.pod.digest();

    for (std::uint64_t nonce = 0;; ++nonce) {
        b.header.nonce = nonce;
        if (b.header.meets_difficulty()) return b;
        if (nonce + 1 == max_tries || nonce == UINT64_MAX) break;
    }
    if (max_tries == UINT64_MAX) throw NonceExhausted();
    return std::nullopt;
}

Block build_block(const BlockHeader& parent, std::vector<Transaction> txs,
                  const VehicleIdentity& sealer, PodProof pod, std::uint64_t clock_ms,
                  const ChainParams& params) {
    auto block = try_build_block(parent, std::move(txs), sealer, std::move(pod), clock_ms, params,
                                 UINT64_MAX);
    if (!block) throw NonceExhausted();
    return std::move(*block);
}

} // namespace ivbc
