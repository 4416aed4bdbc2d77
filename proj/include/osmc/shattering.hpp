#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <random>
#include <vector>

#include "osmc/distances.hpp"
#include "osmc/error.hpp"

namespace osmc {

struct ShatterOptions {
    std::uint64_t max_sets = 2'000'000; // column sets examined before switching to sampling
    bool require_exhaustive = false;    // throw BudgetExceeded instead of sampling
    std::uint64_t seed = 1;
};

struct ShatterResult {
    bool found = false;
    std::vector<std::size_t> columns;            // 0-based pattern positions of the witness
    std::vector<std::uint32_t> witness_rows;     // one row per sign combination, in mask order
    bool exhaustive = true;
    std::uint64_t sets_checked = 0;
};

namespace detail {

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t r)
{
    if (r > n) return 0;
    unsigned __int128 b = 1;
    for (std::uint64_t i = 1; i <= r; ++i) {
        b = b * (n - r + i) / i;
        if (b > (unsigned __int128)1 << 62) return std::uint64_t(1) << 62;
    }
    return std::uint64_t(b);
}

/// Distinct rows as one bitset per column: bit r of column c is set when row r
/// holds +1 there.
struct ColumnBits {
    std::size_t words = 0;
    std::vector<std::uint64_t> bits; // `words` per column
    std::vector<std::uint64_t> all;  // every row
    const std::uint64_t* col(std::size_t c) const noexcept { return bits.data() + c * words; }
};

inline ColumnBits column_bits(const PatternMatrix& m, const std::vector<std::uint32_t>& rows)
{
    ColumnBits cb;
    cb.words = (rows.size() + 63) / 64;
    cb.bits.assign(m.length() * cb.words, 0);
    cb.all.assign(cb.words, 0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        cb.all[r >> 6] |= std::uint64_t(1) << (r & 63);
        const auto row = m.row(rows[r]);
        for (std::size_t c = 0; c < m.length(); ++c)
            if ((row[c >> 6] >> (c & 63)) & 1) cb.bits[c * cb.words + (r >> 6)] |= std::uint64_t(1) << (r & 63);
    }
    return cb;
}

/// Splits each of the 2^p cells by column c (new bit p of the cell index).
/// Returns false as soon as a cell comes out empty.
inline bool refine(const ColumnBits& cb, const std::vector<std::uint64_t>& cells, std::size_t p, std::size_t c,
                   std::vector<std::uint64_t>& out)
{
    const std::size_t w = cb.words, half = std::size_t(1) << p;
    out.resize(2 * half * w);
    const std::uint64_t* col = cb.col(c);
    for (std::size_t mask = 0; mask < half; ++mask) {
        const std::uint64_t* in = cells.data() + mask * w;
        std::uint64_t* lo = out.data() + mask * w;
        std::uint64_t* hi = out.data() + (mask | half) * w;
        std::uint64_t any_lo = 0, any_hi = 0;
        for (std::size_t i = 0; i < w; ++i) {
            lo[i] = in[i] & ~col[i];
            hi[i] = in[i] & col[i];
            any_lo |= lo[i];
            any_hi |= hi[i];
        }
        if (!any_lo || !any_hi) return false;
    }
    return true;
}

} // namespace detail

/// Looks for d columns (d <= 6) on which the rows realize all 2^d sign
/// combinations. Rows are deduplicated first. The exhaustive search extends
/// column sets one column at a time and drops a prefix as soon as it is not
/// shattered itself.
inline ShatterResult shattering_check(const PatternMatrix& m, std::size_t d, const ShatterOptions& opt = {})
{
    if (m.mode() != PatternMode::Binary) throw Error(ErrorCode::ModeMismatch, "shattering needs binary patterns");
    if (d < 1 || d > 6) throw Error(ErrorCode::InvalidInput, "shattering dimension must be in [1, 6]");
    ShatterResult res;
    const std::size_t L = m.length();
    if (d > L) return res;

    const DistinctPatterns distinct = distinct_patterns(m);
    const auto& rows = distinct.representative;
    if (rows.size() < (std::size_t(1) << d)) return res;

    const detail::ColumnBits cb = detail::column_bits(m, rows);
    std::vector<std::vector<std::uint64_t>> level(d + 1);
    level[0] = cb.all;
    std::array<std::size_t, 6> cols{};
    auto record = [&] {
        res.found = true;
        res.columns.assign(cols.begin(), cols.begin() + std::ptrdiff_t(d));
        const std::size_t w = cb.words;
        for (std::size_t mask = 0; mask < (std::size_t(1) << d); ++mask)
            for (std::size_t i = 0; i < w; ++i)
                if (const std::uint64_t b = level[d][mask * w + i]) {
                    res.witness_rows.push_back(rows[i * 64 + std::size_t(std::countr_zero(b))]);
                    break;
                }
    };

    const std::uint64_t total = detail::binomial(L, d);
    if (total <= opt.max_sets) {
        // depth-first over increasing column sets
        auto search = [&](auto&& self, std::size_t p, std::size_t start) -> bool {
            for (std::size_t c = start; c + (d - p) <= L; ++c) {
                cols[p] = c;
                if (!detail::refine(cb, level[p], p, c, level[p + 1])) {
                    res.sets_checked += detail::binomial(L - 1 - c, d - p - 1);
                    continue;
                }
                if (p + 1 == d) {
                    ++res.sets_checked;
                    return true;
                }
                if (self(self, p + 1, c + 1)) return true;
            }
            return false;
        };
        if (search(search, 0, 0)) record();
        return res;
    }
    if (opt.require_exhaustive)
        throw Error(ErrorCode::BudgetExceeded, std::to_string(total) + " column sets exceed the budget of " +
                                                   std::to_string(opt.max_sets));
    res.exhaustive = false;
    std::mt19937_64 rng(opt.seed);
    std::vector<std::size_t> all(L);
    for (std::size_t j = 0; j < L; ++j) all[j] = j;
    for (std::uint64_t s = 0; s < opt.max_sets; ++s) {
        for (std::size_t c = 0; c < d; ++c) std::swap(all[c], all[c + rng() % (L - c)]);
        std::copy(all.begin(), all.begin() + std::ptrdiff_t(d), cols.begin());
        std::sort(cols.begin(), cols.begin() + std::ptrdiff_t(d));
        ++res.sets_checked;
        std::size_t p = 0;
        while (p < d && detail::refine(cb, level[p], p, cols[p], level[p + 1])) ++p;
        if (p == d) {
            record();
            return res;
        }
    }
    return res;
}

} // namespace osmc
