#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <zlib.h>

#include "osmc/encoding.hpp"
#include "osmc/error.hpp"

namespace osmc {

inline constexpr char kEncodingMagic[4] = {'O', 'S', 'M', 'C'};
inline constexpr std::uint16_t kEncodingFormatVersion = 1;

namespace detail {

class ByteWriter {
public:
    template <class T>
    void put(T value)
    {
        for (std::size_t b = 0; b < sizeof(T); ++b) bytes.push_back(std::uint8_t(std::uint64_t(value) >> (8 * b)));
    }
    std::vector<std::uint8_t> bytes;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    template <class T>
    T get()
    {
        if (pos_ + sizeof(T) > data_.size()) throw Error(ErrorCode::CorruptEncoding, "truncated encoding");
        std::uint64_t v = 0;
        for (std::size_t b = 0; b < sizeof(T); ++b) v |= std::uint64_t(data_[pos_ + b]) << (8 * b);
        pos_ += sizeof(T);
        return T(v);
    }
    std::size_t remaining() const noexcept { return data_.size() - pos_; }

private:
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

inline std::uint32_t crc32_of(std::span<const std::uint8_t> bytes)
{
    uLong crc = ::crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed in chunks
    for (std::size_t off = 0; off < bytes.size();) {
        const std::size_t n = std::min<std::size_t>(bytes.size() - off, 1u << 30);
        crc = ::crc32(crc, bytes.data() + off, uInt(n));
        off += n;
    }
    return std::uint32_t(crc);
}

} // namespace detail

/// Binary layout (all integers little-endian):
///   "OSMC" | u16 format version | u8 mode | u8 reserved (0)
///   u32 k | u32 pattern length | u32 x | u32 terminal count | u64 seed
///   u32 height | u32 node count | u32 leaf count | u32 version count
///   nodes (u32 left, u32 right, u32 ones) | leaves (u64) | version roots (u32)
///   terminals (u32 vertex, u32 base, u32 version)
///   u32 CRC-32 of everything before it
inline std::vector<std::uint8_t> serialize(const Encoding& enc)
{
    detail::ByteWriter w;
    for (char c : kEncodingMagic) w.put(std::uint8_t(c));
    w.put(kEncodingFormatVersion);
    w.put(std::uint8_t(enc.mode));
    w.put(std::uint8_t(0));
    w.put(enc.k);
    w.put(std::uint32_t(enc.index.length()));
    w.put(enc.x);
    w.put(std::uint32_t(enc.terminals.size()));
    w.put(enc.seed);
    w.put(std::uint32_t(enc.index.height()));
    w.put(std::uint32_t(enc.index.node_count()));
    w.put(std::uint32_t(enc.index.leaf_count()));
    w.put(std::uint32_t(enc.index.version_count()));
    for (const auto& n : enc.index.nodes()) {
        w.put(n.left);
        w.put(n.right);
        w.put(n.ones);
    }
    for (std::uint64_t leaf : enc.index.leaves()) w.put(leaf);
    for (std::uint32_t r : enc.index.roots()) w.put(r);
    for (const auto& t : enc.terminals) {
        w.put(t.vertex);
        w.put(t.base);
        w.put(t.version);
    }
    w.put(detail::crc32_of(w.bytes));
    return std::move(w.bytes);
}

/// Inverse of serialize; any inconsistency raises CorruptEncoding.
inline Encoding deserialize(std::span<const std::uint8_t> bytes)
{
    auto bad = [](const std::string& why) { throw Error(ErrorCode::CorruptEncoding, why); };
    if (bytes.size() < 4 + 4 || std::memcmp(bytes.data(), kEncodingMagic, 4) != 0) bad("bad magic");
    const std::size_t body = bytes.size() - 4;
    detail::ByteReader crc_reader(bytes.subspan(body));
    if (crc_reader.get<std::uint32_t>() != detail::crc32_of(bytes.first(body))) bad("checksum mismatch");

    detail::ByteReader r(bytes.first(body));
    r.get<std::uint32_t>(); // magic
    if (r.get<std::uint16_t>() != kEncodingFormatVersion) bad("unsupported format version");
    const auto mode = r.get<std::uint8_t>();
    if (mode > std::uint8_t(EncodingMode::SingleFaceT)) bad("unknown mode");
    if (r.get<std::uint8_t>() != 0) bad("reserved byte set");

    Encoding enc;
    enc.mode = EncodingMode(mode);
    enc.k = r.get<std::uint32_t>();
    const auto length = r.get<std::uint32_t>();
    enc.x = r.get<std::uint32_t>();
    const auto terminals = r.get<std::uint32_t>();
    enc.seed = r.get<std::uint64_t>();
    const auto height = r.get<std::uint32_t>();
    const auto node_count = r.get<std::uint32_t>();
    const auto leaf_count = r.get<std::uint32_t>();
    const auto version_count = r.get<std::uint32_t>();
    if (enc.k < 3 || length != 2 * enc.k - 1) bad("pattern length does not match k");
    const unsigned __int128 need = (unsigned __int128)node_count * 12 + (unsigned __int128)leaf_count * 8 +
                                   (unsigned __int128)version_count * 4 + (unsigned __int128)terminals * 12;
    if (need != r.remaining()) bad("section sizes do not match file size");

    std::vector<VersionedPrefixIndex::Node> nodes(node_count);
    for (auto& n : nodes) {
        n.left = r.get<std::uint32_t>();
        n.right = r.get<std::uint32_t>();
        n.ones = r.get<std::uint32_t>();
    }
    std::vector<std::uint64_t> leaves(leaf_count);
    for (auto& l : leaves) l = r.get<std::uint64_t>();
    std::vector<std::uint32_t> roots(version_count);
    for (auto& v : roots) v = r.get<std::uint32_t>();
    enc.index = VersionedPrefixIndex::from_raw(length, std::move(nodes), std::move(leaves), std::move(roots));
    if (enc.index.height() != height) bad("index height does not match pattern length");

    enc.terminals.resize(terminals);
    for (auto& t : enc.terminals) {
        t.vertex = r.get<std::uint32_t>();
        t.base = r.get<std::uint32_t>();
        t.version = r.get<std::uint32_t>();
        if (t.version >= version_count) bad("terminal version out of range");
    }
    for (std::size_t i = 1; i < enc.terminals.size(); ++i)
        if (enc.terminals[i - 1].vertex >= enc.terminals[i].vertex) bad("terminal table not strictly sorted");
    return enc;
}

inline void write_encoding(const std::string& path, const Encoding& enc)
{
    const auto bytes = serialize(enc);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

inline Encoding read_encoding(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

} // namespace osmc
