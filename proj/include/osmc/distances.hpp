#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <thread>
#include <unordered_map>
#include <vector>

#include "osmc/error.hpp"
#include "osmc/instance.hpp"
#include "osmc/planar_graph.hpp"

namespace osmc {

inline constexpr std::uint32_t kUnreached = npos32;

/// Hop counts from a single vertex.
inline std::vector<std::uint32_t> bfs(const PlanarGraph& g, Vertex source)
{
    std::vector<std::uint32_t> dist(g.vertex_count(), kUnreached);
    std::vector<Vertex> queue;
    queue.reserve(g.vertex_count());
    dist[source] = 0;
    queue.push_back(source);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        Vertex v = queue[head];
        const std::uint32_t next = dist[v] + 1;
        for (Dart d : g.rotation(v)) {
            Vertex w = g.head(d);
            if (dist[w] == kUnreached) {
                dist[w] = next;
                queue.push_back(w);
            }
        }
    }
    return dist;
}

namespace detail {

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn)
{
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    threads = unsigned(std::min<std::size_t>(threads, count));
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += threads) fn(i);
        });
}

} // namespace detail

/// dist(i, v) for every source i of an instance (sources 0-based here).
class DistanceField {
public:
    DistanceField() = default;
    DistanceField(std::size_t sources, std::size_t vertices, bool subdivided)
        : sources_(sources), vertices_(vertices), subdivided_(subdivided), data_(sources * vertices, kUnreached)
    {
    }

    std::size_t source_count() const noexcept { return sources_; }
    std::size_t vertex_count() const noexcept { return vertices_; }
    bool subdivided() const noexcept { return subdivided_; }

    std::uint32_t at(std::size_t source, Vertex v) const noexcept { return data_[source * vertices_ + v]; }
    std::span<const std::uint32_t> row(std::size_t source) const noexcept
    {
        return {data_.data() + source * vertices_, vertices_};
    }
    std::span<std::uint32_t> row(std::size_t source) noexcept { return {data_.data() + source * vertices_, vertices_}; }

private:
    std::size_t sources_ = 0;
    std::size_t vertices_ = 0;
    bool subdivided_ = false;
    std::vector<std::uint32_t> data_;
};

inline DistanceField all_source_bfs(const OSInstance& inst, bool subdivided = false, unsigned threads = 1)
{
    DistanceField field(inst.k(), inst.graph().vertex_count(), subdivided);
    detail::parallel_for(inst.k(), threads, [&](std::size_t i) {
        auto d = bfs(inst.graph(), inst.sources()[i]);
        std::copy(d.begin(), d.end(), field.row(i).begin());
    });
    return field;
}

inline DistanceField all_source_bfs(const SubdividedInstance& sub, unsigned threads = 1)
{
    return all_source_bfs(sub.instance(), true, threads);
}

enum class PatternMode : std::uint8_t { Ternary, Binary };

/// One vertex's pattern as plain entries in {-1, 0, +1}.
struct Pattern {
    PatternMode mode = PatternMode::Binary;
    std::vector<std::int8_t> entries;

    bool operator==(const Pattern&) const = default;
};

/// Patterns of many vertices, bit-packed: one bit per entry in binary mode
/// (1 encodes +1) and two bits per entry in ternary mode (0b00, 0b01, 0b10 for
/// -1, 0, +1).
class PatternMatrix {
public:
    PatternMatrix() = default;
    PatternMatrix(std::size_t rows, std::size_t length, PatternMode mode)
        : rows_(rows), length_(length), mode_(mode),
          words_per_row_((length * bits_per_entry(mode) + 63) / 64), bits_(rows * words_per_row_, 0)
    {
    }

    static constexpr unsigned bits_per_entry(PatternMode m) noexcept { return m == PatternMode::Binary ? 1 : 2; }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t length() const noexcept { return length_; }
    PatternMode mode() const noexcept { return mode_; }
    std::size_t words_per_row() const noexcept { return words_per_row_; }

    std::span<const std::uint64_t> row(std::size_t r) const noexcept
    {
        return {bits_.data() + r * words_per_row_, words_per_row_};
    }
    std::span<std::uint64_t> row(std::size_t r) noexcept { return {bits_.data() + r * words_per_row_, words_per_row_}; }

    int get(std::size_t r, std::size_t j) const noexcept
    {
        const std::uint64_t* w = bits_.data() + r * words_per_row_;
        if (mode_ == PatternMode::Binary) return ((w[j >> 6] >> (j & 63)) & 1) ? 1 : -1;
        const std::size_t b = 2 * j;
        return int((w[b >> 6] >> (b & 63)) & 3) - 1;
    }

    void set(std::size_t r, std::size_t j, int value) noexcept
    {
        std::uint64_t* w = bits_.data() + r * words_per_row_;
        if (mode_ == PatternMode::Binary) {
            const std::uint64_t mask = std::uint64_t(1) << (j & 63);
            if (value > 0) w[j >> 6] |= mask;
            else w[j >> 6] &= ~mask;
            return;
        }
        const std::size_t b = 2 * j;
        w[b >> 6] &= ~(std::uint64_t(3) << (b & 63));
        w[b >> 6] |= std::uint64_t(value + 1) << (b & 63);
    }

    Pattern pattern(std::size_t r) const
    {
        Pattern p{mode_, std::vector<std::int8_t>(length_)};
        for (std::size_t j = 0; j < length_; ++j) p.entries[j] = std::int8_t(get(r, j));
        return p;
    }

    bool rows_equal(std::size_t a, std::size_t b) const noexcept
    {
        return std::equal(row(a).begin(), row(a).end(), row(b).begin());
    }

    /// Number of differing entries between two binary rows.
    std::size_t hamming(std::size_t a, std::size_t b) const noexcept
    {
        std::size_t h = 0;
        auto ra = row(a), rb = row(b);
        for (std::size_t w = 0; w < words_per_row_; ++w) h += std::size_t(std::popcount(ra[w] ^ rb[w]));
        return h;
    }

private:
    std::size_t rows_ = 0;
    std::size_t length_ = 0;
    PatternMode mode_ = PatternMode::Binary;
    std::size_t words_per_row_ = 0;
    std::vector<std::uint64_t> bits_;
};

/// p_v[i] = d(v, s_{i+1}) - d(v, s_i). Ternary patterns need a field over the
/// original graph, binary ones a field over the subdivided graph.
inline PatternMatrix compute_patterns(const DistanceField& field, PatternMode mode)
{
    if (mode == PatternMode::Binary && !field.subdivided())
        throw Error(ErrorCode::ModeMismatch, "binary patterns require a distance field of the subdivided graph");
    if (mode == PatternMode::Ternary && field.subdivided())
        throw Error(ErrorCode::ModeMismatch, "ternary patterns are defined on the original graph");
    if (field.source_count() < 2) throw Error(ErrorCode::KTooSmall, "need at least two sources");

    PatternMatrix out(field.vertex_count(), field.source_count() - 1, mode);
    for (std::size_t i = 0; i + 1 < field.source_count(); ++i) {
        auto a = field.row(i), b = field.row(i + 1);
        for (Vertex v = 0; v < field.vertex_count(); ++v) {
            const long long diff = (long long)b[v] - (long long)a[v];
            if (diff < -1 || diff > 1 || (mode == PatternMode::Binary && diff == 0))
                throw Error(ErrorCode::InvalidInput, "distance difference " + std::to_string(diff) + " at vertex " +
                                                         std::to_string(v) + " violates the pattern alphabet");
            out.set(v, i, int(diff));
        }
    }
    return out;
}

/// Binary patterns of every vertex of G' plus d_{G'}(v, s'_1), computed source by
/// source without materializing the full 2k x n' distance field.
struct BinaryPatterns {
    PatternMatrix patterns;
    std::vector<std::uint32_t> dist_to_first; // subdivided metric, i.e. 2 * d_G for base vertices
};

inline BinaryPatterns compute_binary_patterns(const SubdividedInstance& sub, unsigned threads = 1)
{
    const PlanarGraph& g = sub.graph();
    const std::size_t sources = sub.sources().size();
    BinaryPatterns out{PatternMatrix(g.vertex_count(), sources - 1, PatternMode::Binary), {}};
    out.dist_to_first = bfs(g, sub.sources()[0]);

    const std::size_t chunk = std::max<std::size_t>(1, threads) * 4;
    std::vector<std::uint32_t> prev = out.dist_to_first;
    std::vector<std::vector<std::uint32_t>> buf(chunk);
    for (std::size_t start = 1; start < sources; start += chunk) {
        const std::size_t count = std::min(chunk, sources - start);
        detail::parallel_for(count, threads, [&](std::size_t c) { buf[c] = bfs(g, sub.sources()[start + c]); });
        for (std::size_t c = 0; c < count; ++c) {
            const std::size_t entry = start + c - 1;
            const std::size_t word = entry >> 6;
            const std::uint64_t mask = std::uint64_t(1) << (entry & 63);
            for (Vertex v = 0; v < g.vertex_count(); ++v) {
                const long long diff = (long long)buf[c][v] - (long long)prev[v];
                if (diff == 1) out.patterns.row(v)[word] |= mask;
                else if (diff != -1)
                    throw Error(ErrorCode::InvalidInput, "subdivided distance difference " + std::to_string(diff) +
                                                             " at vertex " + std::to_string(v));
            }
            prev.swap(buf[c]);
        }
    }
    return out;
}

/// p[i] = (p^[2i-1] + p^[2i]) / 2 (1-based), dropping the trailing entry.
inline Pattern ternary_from_binary(const Pattern& binary)
{
    if (binary.mode != PatternMode::Binary)
        throw Error(ErrorCode::ModeMismatch, "ternary_from_binary expects a binary pattern");
    if (binary.entries.size() % 2 == 0)
        throw Error(ErrorCode::InvalidInput, "binary pattern length must be 2k-1");
    Pattern out{PatternMode::Ternary, {}};
    for (std::size_t i = 0; i + 1 < binary.entries.size(); i += 2)
        out.entries.push_back(std::int8_t((binary.entries[i] + binary.entries[i + 1]) / 2));
    return out;
}

/// d(v, s_i) from d(v, s_1) and the pattern, for 1 <= i <= k. In binary mode the
/// pattern is over S' and the result is in the original metric (halved).
inline long long reconstruct_distance(long long base, const Pattern& p, std::size_t i)
{
    const std::size_t k = (p.mode == PatternMode::Ternary) ? p.entries.size() + 1 : (p.entries.size() + 1) / 2;
    if (i < 1 || i > k)
        throw Error(ErrorCode::IndexOutOfRange,
                    "source index " + std::to_string(i) + " not in [1, " + std::to_string(k) + "]");
    long long sum = 0;
    if (p.mode == PatternMode::Ternary) {
        for (std::size_t j = 0; j + 1 < i; ++j) sum += p.entries[j];
        return base + sum;
    }
    for (std::size_t j = 0; j < 2 * (i - 1); ++j) sum += p.entries[j];
    return base + sum / 2;
}

struct DistinctPatterns {
    std::size_t count = 0;                   // x
    std::vector<std::uint32_t> class_of;     // row -> class id (classes numbered by first appearance)
    std::vector<std::uint32_t> representative; // class -> smallest row in it
    std::vector<std::uint32_t> class_size;

    std::size_t max_class_size() const noexcept
    {
        return class_size.empty() ? 0 : *std::max_element(class_size.begin(), class_size.end());
    }
};

namespace detail {

inline std::uint64_t hash_words(std::span<const std::uint64_t> words) noexcept
{
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (std::uint64_t w : words) {
        h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        h *= 0xff51afd7ed558ccdull;
    }
    return h;
}

} // namespace detail

/// Exact deduplication (hash, then verify on every bucket hit).
inline DistinctPatterns distinct_patterns(const PatternMatrix& m, std::span<const Vertex> only = {})
{
    DistinctPatterns out;
    out.class_of.assign(m.rows(), npos32);
    std::unordered_multimap<std::uint64_t, std::uint32_t> buckets;
    auto visit = [&](std::uint32_t r) {
        const std::uint64_t h = detail::hash_words(m.row(r));
        auto [lo, hi] = buckets.equal_range(h);
        for (auto it = lo; it != hi; ++it)
            if (m.rows_equal(out.representative[it->second], r)) {
                out.class_of[r] = it->second;
                ++out.class_size[it->second];
                return;
            }
        const auto id = std::uint32_t(out.representative.size());
        buckets.emplace(h, id);
        out.representative.push_back(r);
        out.class_size.push_back(1);
        out.class_of[r] = id;
    };
    if (only.empty())
        for (std::uint32_t r = 0; r < m.rows(); ++r) visit(r);
    else
        for (Vertex r : only) visit(r);
    out.count = out.representative.size();
    return out;
}

/// Two rows u, v and indices a < b < c < d with u = (-1, 1, -1, 1) and
/// v = (1, -1, 1, -1) on them.
struct ForbiddenWitness {
    std::uint32_t u = 0, v = 0;
    std::size_t index[4] = {0, 0, 0, 0};
};

inline std::optional<ForbiddenWitness> forbidden_pair(const PatternMatrix& m, std::uint32_t u, std::uint32_t v)
{
    ForbiddenWitness w{u, v, {}};
    int want = -1;
    std::size_t found = 0;
    if (m.mode() == PatternMode::Binary) {
        const auto ru = m.row(u), rv = m.row(v);
        for (std::size_t i = 0; i < ru.size() && found < 4; ++i) {
            const std::uint64_t down = ~ru[i] & rv[i], up = ru[i] & ~rv[i]; // (u, v) = (-1, +1) and (+1, -1)
            std::uint64_t used = 0;
            while (found < 4) {
                const std::uint64_t cand = (want < 0 ? down : up) & ~used;
                if (!cand) break;
                const int bit = std::countr_zero(cand);
                w.index[found++] = i * 64 + std::size_t(bit);
                used = bit == 63 ? ~std::uint64_t(0) : (std::uint64_t(2) << bit) - 1;
                want = -want;
            }
        }
        if (found == 4) return w;
        return std::nullopt;
    }
    for (std::size_t j = 0; j < m.length() && found < 4; ++j)
        if (m.get(u, j) == want && m.get(v, j) == -want) {
            w.index[found++] = j;
            want = -want;
        }
    if (found == 4) return w;
    return std::nullopt;
}

/// Searches the rows (typically one representative per distinct pattern) for the
/// configuration forbidden by planarity. Exhaustive over ordered pairs unless
/// `max_pairs` is exceeded, in which case pairs are sampled deterministically.
inline std::optional<ForbiddenWitness> find_forbidden_configuration(const PatternMatrix& m,
                                                                    std::span<const std::uint32_t> rows,
                                                                    std::size_t max_pairs = 50'000'000,
                                                                    bool* exhaustive = nullptr)
{
    const std::size_t r = rows.size();
    const bool full = r * r <= max_pairs;
    if (exhaustive) *exhaustive = full;
    if (full) {
        for (std::size_t a = 0; a < r; ++a)
            for (std::size_t b = 0; b < r; ++b)
                if (a != b)
                    if (auto w = forbidden_pair(m, rows[a], rows[b])) return w;
        return std::nullopt;
    }
    std::uint64_t state = 0x243f6a8885a308d3ull;
    for (std::size_t s = 0; s < max_pairs; ++s) {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        std::size_t a = (state >> 33) % r;
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        std::size_t b = (state >> 33) % r;
        if (a != b)
            if (auto w = forbidden_pair(m, rows[a], rows[b])) return w;
    }
    return std::nullopt;
}

} // namespace osmc
