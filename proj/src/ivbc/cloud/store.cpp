#include "ivbc/cloud/store.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace ivbc::cloud {

namespace {

constexpr char kMagic[4] = {'I', 'V', 'B', 'C'};
constexpr std::uint8_t kVersion = 1;

void write_u32_be(std::ofstream& out, std::uint32_t v) {
    std::uint8_t buf[4];
    for (int i = 3; i >= 0; --i) {
        buf[i] = static_cast<std::uint8_t>(v);
        v >>= 8;
    }
    out.write(reinterpret_cast<const char*>(buf), 4);
}

} // namespace

const char* record_kind_name(RecordKind k) {
    switch (k) {
    case RecordKind::Block: return "block";
    case RecordKind::Message: return "message";
    case RecordKind::Snapshot: return "snapshot";
    case RecordKind::Provision: return "provision";
    }
    return "unknown";
}

Bytes encode_provision(const std::vector<ProvisionEntry>& entries) {
    ByteWriter w;
    w.u64(entries.size());
    for (const ProvisionEntry& e : entries) {
        w.hash(e.ivtp_id);
        w.var_bytes(e.public_key);
        w.var_bytes(e.label);
        w.u64(e.initial_balance);
    }
    return w.take();
}

std::vector<ProvisionEntry> decode_provision(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    std::uint64_t n = r.u64();
    if (n > r.remaining() / 48) throw DecodeError("provision count exceeds record");
    std::vector<ProvisionEntry> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        ProvisionEntry e;
        e.ivtp_id = r.hash();
        e.public_key = r.var_bytes();
        Bytes label = r.var_bytes();
        e.label.assign(label.begin(), label.end());
        e.initial_balance = r.u64();
        out.push_back(std::move(e));
    }
    r.expect_done();
    return out;
}

std::filesystem::path CloudStore::log_path(const std::filesystem::path& dir, RecordKind kind) {
    switch (kind) {
    case RecordKind::Block: return dir / "blocks.log";
    case RecordKind::Message: return dir / "messages.log";
    case RecordKind::Snapshot:
    case RecordKind::Provision: return dir / "snapshots.log";
    }
    throw StorageError("unknown record kind");
}

CloudStore CloudStore::create(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::filesystem::create_directories(dir / "index");
    for (RecordKind kind : {RecordKind::Block, RecordKind::Message, RecordKind::Snapshot}) {
        std::filesystem::path p = log_path(dir, kind);
        if (std::filesystem::exists(p))
            throw StorageError("run directory already contains " + p.filename().string());
        std::ofstream out(p, std::ios::binary);
        if (!out) throw StorageError("cannot create " + p.string());
        out.write(kMagic, 4);
        out.put(static_cast<char>(kVersion));
        if (!out) throw StorageError("cannot write header of " + p.string());
    }
    return CloudStore(dir);
}

CloudStore CloudStore::open(const std::filesystem::path& dir) {
    CloudStore store(dir);
    for (RecordKind kind : {RecordKind::Block, RecordKind::Message, RecordKind::Snapshot})
        store.scan_log(kind);
    return store;
}

void CloudStore::scan_log(RecordKind kind) {
    std::filesystem::path p = log_path(dir_, kind);
    std::ifstream in(p, std::ios::binary);
    if (!in) throw StorageError("missing log file: " + p.string());

    char magic[4];
    in.read(magic, 4);
    int version = in.get();
    if (!in || std::memcmp(magic, kMagic, 4) != 0 || version != kVersion)
        throw StorageError("bad log header in " + p.string());

    std::uint64_t offset = 5;
    for (;;) {
        std::uint8_t len_buf[4];
        in.read(reinterpret_cast<char*>(len_buf), 4);
        if (in.gcount() == 0 && in.eof()) break;
        if (in.gcount() != 4) throw StorageError("truncated frame length in " + p.string());
        std::uint32_t len = 0;
        for (int i = 0; i < 4; ++i) len = (len << 8) | len_buf[i];
        if (len < 9) throw StorageError("impossible frame length in " + p.string());

        Bytes payload(len);
        in.read(reinterpret_cast<char*>(payload.data()), len);
        if (static_cast<std::uint32_t>(in.gcount()) != len)
            throw StorageError("truncated frame in " + p.string());

        ByteReader r(payload);
        std::uint64_t id = r.u64();
        auto rec_kind = static_cast<RecordKind>(r.u8());
        if (index_.contains(id)) throw StorageError("duplicate record id in " + p.string());
        index_[id] = Location{rec_kind, offset};
        if (id >= next_id_) next_id_ = id + 1;
        offset += 4 + len;
    }
}

std::uint64_t CloudStore::append(RecordKind kind, std::span<const std::uint8_t> body) {
    std::filesystem::path p = log_path(dir_, kind);
    std::ofstream out(p, std::ios::binary | std::ios::app);
    if (!out) throw StorageError("cannot open " + p.string() + " for append");

    std::uint64_t offset = std::filesystem::file_size(p);
    std::uint64_t id = next_id_++;

    ByteWriter payload;
    payload.u64(id);
    payload.u8(static_cast<std::uint8_t>(kind));
    // body appended raw after the prelude
    Bytes frame = payload.take();
    frame.insert(frame.end(), body.begin(), body.end());
    if (frame.size() > 0xffffffffull) throw StorageError("record too large");

    write_u32_be(out, static_cast<std::uint32_t>(frame.size()));
    out.write(reinterpret_cast<const char*>(frame.data()), static_cast<std::streamsize>(frame.size()));
    out.flush();
    if (!out) throw StorageError("write failed on " + p.string());

    index_[id] = Location{kind, offset};
    return id;
}

std::optional<Record> CloudStore::fetch(std::uint64_t id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;

    std::filesystem::path p = log_path(dir_, it->second.kind);
    std::ifstream in(p, std::ios::binary);
    if (!in) throw StorageError("missing log file: " + p.string());
    in.seekg(static_cast<std::streamoff>(it->second.offset));

    std::uint8_t len_buf[4];
    in.read(reinterpret_cast<char*>(len_buf), 4);
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len = (len << 8) | len_buf[i];
    Bytes payload(len);
    in.read(reinterpret_cast<char*>(payload.data()), len);
    if (!in) throw StorageError("truncated record in " + p.string());

    ByteReader r(payload);
    Record rec;
    rec.id = r.u64();
    rec.kind = static_cast<RecordKind>(r.u8());
    rec.body.assign(payload.begin() + 9, payload.end());
    if (rec.id != id) throw StorageError("record id mismatch in " + p.string());
    return rec;
}

std::vector<Record> CloudStore::records(RecordKind kind) const {
    std::vector<Record> out;
    for (const auto& [id, loc] : index_) {
        if (loc.kind != kind) continue;
        auto rec = fetch(id);
        if (rec) out.push_back(std::move(*rec));
    }
    return out;
}

} // namespace ivbc::cloud
