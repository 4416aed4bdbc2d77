#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "osmc/error.hpp"
#include "osmc/planar_graph.hpp"

namespace osmc {

/// Persistent prefix sums over a vector of +-1 values (stored as bits, 1 = +1).
///
/// Values are packed 64 to a leaf word; internal nodes hold two child references
/// and the number of +1 entries below them. An update copies the union of the
/// root-to-leaf paths of the flipped positions and registers a new version;
/// every older version stays queryable unchanged.
class VersionedPrefixIndex {
public:
    using Version = std::uint32_t;

    struct Node {
        std::uint32_t left = npos32;
        std::uint32_t right = npos32;
        std::uint32_t ones = 0;

        bool operator==(const Node&) const = default;
    };

    VersionedPrefixIndex() = default;

    VersionedPrefixIndex(std::span<const std::uint64_t> bits, std::size_t length)
        : length_(length), blocks_(std::max<std::size_t>(1, (length + 63) / 64)),
          height_(std::size_t(std::bit_width(blocks_ - 1)))
    {
        std::vector<std::uint64_t> words(blocks_, 0);
        for (std::size_t b = 0; b < blocks_ && b < bits.size(); ++b) words[b] = bits[b];
        if (length % 64) words[blocks_ - 1] &= (std::uint64_t(1) << (length % 64)) - 1;
        roots_.push_back(build(words, height_, 0));
    }

    std::size_t length() const noexcept { return length_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t version_count() const noexcept { return roots_.size(); }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t leaf_count() const noexcept { return leaves_.size(); }
    std::uint32_t root(Version v) const { return roots_.at(v); }

    /// New version equal to `base` with the given positions flipped.
    Version update(Version base, std::span<const std::uint32_t> positions)
    {
        std::vector<std::uint32_t> sorted(positions.begin(), positions.end());
        std::sort(sorted.begin(), sorted.end());
        for (std::uint32_t p : sorted)
            if (p >= length_) throw Error(ErrorCode::IndexOutOfRange, "update position " + std::to_string(p));
        roots_.push_back(sorted.empty() ? roots_.at(base) : update_rec(roots_.at(base), height_, 0, sorted));
        return Version(roots_.size() - 1);
    }

    /// Sum of the first j values of version v.
    long long prefix_sum(Version v, std::size_t j) const
    {
        if (j > length_) throw Error(ErrorCode::IndexOutOfRange, "prefix length " + std::to_string(j));
        return 2 * (long long)prefix_ones(roots_.at(v), j) - (long long)j;
    }

    int value(Version v, std::size_t j) const
    {
        if (j >= length_) throw Error(ErrorCode::IndexOutOfRange, "position " + std::to_string(j));
        return (prefix_ones(roots_.at(v), j + 1) - prefix_ones(roots_.at(v), j)) ? 1 : -1;
    }

    /// Packed bits of version v (for tests and verification).
    std::vector<std::uint64_t> bits(Version v) const
    {
        std::vector<std::uint64_t> out(blocks_, 0);
        collect(roots_.at(v), height_, 0, out);
        return out;
    }

    // Raw storage, used by serialization.
    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const std::vector<std::uint64_t>& leaves() const noexcept { return leaves_; }
    const std::vector<std::uint32_t>& roots() const noexcept { return roots_; }

    /// Rebuilds an index from raw storage; throws CorruptEncoding unless every
    /// reference is in range and every count is consistent.
    static VersionedPrefixIndex from_raw(std::size_t length, std::vector<Node> nodes, std::vector<std::uint64_t> leaves,
                                         std::vector<std::uint32_t> roots)
    {
        VersionedPrefixIndex idx;
        idx.length_ = length;
        idx.blocks_ = std::max<std::size_t>(1, (length + 63) / 64);
        idx.height_ = std::size_t(std::bit_width(idx.blocks_ - 1));
        idx.nodes_ = std::move(nodes);
        idx.leaves_ = std::move(leaves);
        idx.roots_ = std::move(roots);
        if (idx.roots_.empty()) throw Error(ErrorCode::CorruptEncoding, "index has no versions");
        std::vector<std::int8_t> level(idx.nodes_.size(), -1);
        for (std::uint32_t r : idx.roots_) idx.check(r, idx.height_, 0, level);
        return idx;
    }

private:
    std::uint32_t ones_of(std::uint32_t ref, std::size_t h) const noexcept
    {
        if (ref == npos32) return 0;
        return h == 0 ? std::uint32_t(std::popcount(leaves_[ref])) : nodes_[ref].ones;
    }

    std::uint32_t build(const std::vector<std::uint64_t>& words, std::size_t h, std::size_t lo)
    {
        if (lo >= blocks_) return npos32;
        if (h == 0) {
            leaves_.push_back(words[lo]);
            return std::uint32_t(leaves_.size() - 1);
        }
        const std::size_t half = std::size_t(1) << (h - 1);
        Node n;
        n.left = build(words, h - 1, lo);
        n.right = build(words, h - 1, lo + half);
        n.ones = ones_of(n.left, h - 1) + ones_of(n.right, h - 1);
        nodes_.push_back(n);
        return std::uint32_t(nodes_.size() - 1);
    }

    std::uint32_t update_rec(std::uint32_t ref, std::size_t h, std::size_t lo, std::span<const std::uint32_t> pos)
    {
        if (h == 0) {
            std::uint64_t w = leaves_[ref];
            for (std::uint32_t p : pos) w ^= std::uint64_t(1) << (p - lo * 64);
            leaves_.push_back(w);
            return std::uint32_t(leaves_.size() - 1);
        }
        const std::size_t half = std::size_t(1) << (h - 1);
        const std::size_t split_at = (lo + half) * 64;
        auto mid = std::lower_bound(pos.begin(), pos.end(), split_at);
        Node n = nodes_[ref];
        if (mid != pos.begin()) n.left = update_rec(n.left, h - 1, lo, {pos.begin(), mid});
        if (mid != pos.end()) n.right = update_rec(n.right, h - 1, lo + half, {mid, pos.end()});
        n.ones = ones_of(n.left, h - 1) + ones_of(n.right, h - 1);
        nodes_.push_back(n);
        return std::uint32_t(nodes_.size() - 1);
    }

    std::size_t prefix_ones(std::uint32_t ref, std::size_t j) const noexcept
    {
        std::size_t acc = 0, lo = 0;
        for (std::size_t h = height_; h > 0; --h) {
            const std::size_t half = std::size_t(1) << (h - 1);
            const Node& n = nodes_[ref];
            if (j >= (lo + half) * 64) {
                acc += ones_of(n.left, h - 1);
                if (n.right == npos32) return acc;
                ref = n.right;
                lo += half;
            } else {
                ref = n.left;
            }
        }
        const std::size_t in_block = j - lo * 64;
        const std::uint64_t w = leaves_[ref];
        if (in_block >= 64) return acc + std::size_t(std::popcount(w));
        return acc + std::size_t(std::popcount(w & ((std::uint64_t(1) << in_block) - 1)));
    }

    void collect(std::uint32_t ref, std::size_t h, std::size_t lo, std::vector<std::uint64_t>& out) const
    {
        if (ref == npos32) return;
        if (h == 0) {
            out[lo] = leaves_[ref];
            return;
        }
        const std::size_t half = std::size_t(1) << (h - 1);
        collect(nodes_[ref].left, h - 1, lo, out);
        collect(nodes_[ref].right, h - 1, lo + half, out);
    }

    void check(std::uint32_t ref, std::size_t h, std::size_t lo, std::vector<std::int8_t>& level) const
    {
        auto bad = [](const std::string& why) { throw Error(ErrorCode::CorruptEncoding, why); };
        if (lo >= blocks_) {
            if (ref != npos32) bad("reference past the last block");
            return;
        }
        if (h == 0) {
            if (ref >= leaves_.size()) bad("leaf reference out of range");
            if (lo == blocks_ - 1 && length_ % 64 && (leaves_[ref] >> (length_ % 64)))
                bad("bits set past the pattern length");
            return;
        }
        if (ref >= nodes_.size()) bad("node reference out of range");
        if (level[ref] == std::int8_t(h)) return; // shared subtree already checked
        if (level[ref] != -1) bad("node referenced at two heights");
        const std::size_t half = std::size_t(1) << (h - 1);
        const Node& n = nodes_[ref];
        if ((n.left != npos32 && h > 1 && n.left >= ref) || (n.right != npos32 && h > 1 && n.right >= ref))
            bad("child created after its parent");
        check(n.left, h - 1, lo, level);
        check(n.right, h - 1, lo + half, level);
        if (n.ones != ones_of(n.left, h - 1) + ones_of(n.right, h - 1)) bad("inconsistent subtree count");
        level[ref] = std::int8_t(h);
    }

    std::size_t length_ = 0;
    std::size_t blocks_ = 1;
    std::size_t height_ = 0;
    std::vector<Node> nodes_;
    std::vector<std::uint64_t> leaves_;
    std::vector<std::uint32_t> roots_;
};

} // namespace osmc
