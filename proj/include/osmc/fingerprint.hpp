#pragma once

#include <bit>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "osmc/error.hpp"

namespace osmc {

struct Fingerprint {
    std::uint64_t value = 0;
    std::size_t length = 0;

    bool operator==(const Fingerprint&) const = default;
};

/// Karp-Rabin fingerprints over {0,1} strings: phi(p) = sum_j bit_j * b^j mod q
/// with positions j starting at 1 (a -1 entry contributes the bit 0).
class Fingerprinter {
public:
    static constexpr std::uint64_t kMersenne61 = (std::uint64_t(1) << 61) - 1;

    Fingerprinter(std::uint64_t base, std::uint64_t modulus, std::size_t max_length)
        : base_(base % modulus), modulus_(modulus), powers_(max_length + 2)
    {
        if (modulus < 5) throw Error(ErrorCode::InvalidInput, "fingerprint modulus too small");
        powers_[0] = 1 % modulus_;
        for (std::size_t e = 1; e < powers_.size(); ++e) powers_[e] = mul(powers_[e - 1], base_);
    }

    /// Base drawn uniformly from [2, q-2] with q = 2^61 - 1.
    static Fingerprinter from_seed(std::uint64_t seed, std::size_t max_length)
    {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::uint64_t> pick(2, kMersenne61 - 2);
        return Fingerprinter(pick(rng), kMersenne61, max_length);
    }

    std::uint64_t base() const noexcept { return base_; }
    std::uint64_t modulus() const noexcept { return modulus_; }
    std::size_t max_length() const noexcept { return powers_.size() - 2; }

    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const noexcept
    {
        return std::uint64_t((unsigned __int128)a * b % modulus_);
    }
    std::uint64_t add(std::uint64_t a, std::uint64_t b) const noexcept
    {
        std::uint64_t s = a + b;
        return s >= modulus_ ? s - modulus_ : s;
    }
    std::uint64_t power(std::size_t e) const { return powers_.at(e); }

    Fingerprint leaf(bool bit) const noexcept { return {bit ? base_ : 0, 1}; }

    /// phi(S1 o S2) = phi(S1) + b^{|S1|} * phi(S2).
    Fingerprint concat(const Fingerprint& a, const Fingerprint& b) const
    {
        return {add(a.value, mul(power(a.length), b.value)), a.length + b.length};
    }

    /// Fingerprint of the first `length` bits of a packed row.
    Fingerprint of(std::span<const std::uint64_t> bits, std::size_t length) const
    {
        std::uint64_t v = 0;
        for (std::size_t j = 0; j < length; ++j)
            if ((bits[j >> 6] >> (j & 63)) & 1) v = add(v, power(j + 1));
        return {v, length};
    }

private:
    std::uint64_t base_;
    std::uint64_t modulus_;
    std::vector<std::uint64_t> powers_;
};

/// Complete binary tree over pattern positions, each node holding the
/// fingerprint of its span. Flipping a position refreshes one leaf-to-root path.
class FingerprintTree {
public:
    FingerprintTree(const Fingerprinter& fp, std::span<const std::uint64_t> bits, std::size_t length)
        : fp_(&fp), length_(length), leaves_(std::bit_ceil(std::max<std::size_t>(length, 1))), nodes_(2 * leaves_)
    {
        if (length > fp.max_length()) throw Error(ErrorCode::InvalidInput, "pattern longer than fingerprinter table");
        for (std::size_t j = 0; j < length; ++j) nodes_[leaves_ + j] = fp.leaf((bits[j >> 6] >> (j & 63)) & 1);
        for (std::size_t v = leaves_ - 1; v >= 1; --v) nodes_[v] = fp.concat(nodes_[2 * v], nodes_[2 * v + 1]);
    }

    Fingerprint root() const noexcept { return nodes_[1]; }
    std::size_t length() const noexcept { return length_; }
    /// Number of tree levels above the leaves.
    std::size_t depth() const noexcept { return std::size_t(std::countr_zero(leaves_)); }
    bool bit(std::size_t j) const noexcept { return nodes_[leaves_ + j].value != 0; }

    /// Toggles position j; returns how many nodes were recomputed.
    std::size_t flip(std::size_t j)
    {
        if (j >= length_) throw Error(ErrorCode::IndexOutOfRange, "flip position " + std::to_string(j));
        std::size_t v = leaves_ + j;
        nodes_[v] = fp_->leaf(nodes_[v].value == 0);
        std::size_t touched = 1;
        for (v >>= 1; v >= 1; v >>= 1, ++touched) nodes_[v] = fp_->concat(nodes_[2 * v], nodes_[2 * v + 1]);
        return touched;
    }

private:
    const Fingerprinter* fp_;
    std::size_t length_;
    std::size_t leaves_;
    std::vector<Fingerprint> nodes_;
};

} // namespace osmc
