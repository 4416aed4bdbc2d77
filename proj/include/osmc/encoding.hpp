#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "osmc/distances.hpp"
#include "osmc/error.hpp"
#include "osmc/fingerprint.hpp"
#include "osmc/instance.hpp"
#include "osmc/pattern_tree.hpp"
#include "osmc/persistent_index.hpp"

namespace osmc {

enum class EncodingMode : std::uint8_t { General = 0, ConnectedT = 1, SingleFaceT = 2 };
enum class RequestedMode : std::uint8_t { Auto, General, ConnectedT, SingleFaceT };

inline std::string to_string(EncodingMode m)
{
    switch (m) {
    case EncodingMode::General: return "general";
    case EncodingMode::ConnectedT: return "connected";
    case EncodingMode::SingleFaceT: return "face";
    }
    return "?";
}

inline RequestedMode parse_mode(const std::string& s)
{
    if (s == "auto") return RequestedMode::Auto;
    if (s == "general") return RequestedMode::General;
    if (s == "connected") return RequestedMode::ConnectedT;
    if (s == "face") return RequestedMode::SingleFaceT;
    throw Error(ErrorCode::InvalidInput, "unknown mode '" + s + "' (auto|general|connected|face)");
}

struct TerminalRecord {
    Vertex vertex = 0;
    std::uint32_t base = 0;    // d_G(v, s_1), original metric
    std::uint32_t version = 0; // index version holding the binary pattern of v

    bool operator==(const TerminalRecord&) const = default;
};

/// Compressed S x T distances: a persistent prefix-sum index over binary
/// patterns plus, per terminal, its base distance and version.
struct Encoding {
    EncodingMode mode = EncodingMode::General;
    std::uint32_t k = 0;
    std::uint32_t x = 0; // pattern tree size; 0 outside general mode
    std::uint64_t seed = 0;
    VersionedPrefixIndex index;
    std::vector<TerminalRecord> terminals; // sorted by vertex

    std::size_t pattern_length() const noexcept { return index.length(); }

    const TerminalRecord& terminal(Vertex v) const
    {
        auto it = std::lower_bound(terminals.begin(), terminals.end(), v,
                                   [](const TerminalRecord& r, Vertex u) { return r.vertex < u; });
        if (it == terminals.end() || it->vertex != v)
            throw Error(ErrorCode::UnknownTerminal, "vertex " + std::to_string(v) + " is not a terminal");
        return *it;
    }

    bool operator==(const Encoding& o) const
    {
        return mode == o.mode && k == o.k && x == o.x && seed == o.seed && terminals == o.terminals &&
               index.length() == o.index.length() && index.nodes() == o.index.nodes() &&
               index.leaves() == o.index.leaves() && index.roots() == o.index.roots();
    }
};

/// d_G(v, s_i) for terminal v and 1-based source index i.
inline long long query(const Encoding& enc, Vertex v, std::size_t i)
{
    const TerminalRecord& r = enc.terminal(v);
    if (i < 1 || i > enc.k)
        throw Error(ErrorCode::IndexOutOfRange,
                    "source index " + std::to_string(i) + " not in [1, " + std::to_string(enc.k) + "]");
    return (long long)r.base + enc.index.prefix_sum(r.version, 2 * (i - 1)) / 2;
}

/// d_{G'}(v, s'_j) for terminal v and 1-based j in [1, 2k]; even j are the
/// face-edge midpoints.
inline long long query_subdivided(const Encoding& enc, Vertex v, std::size_t j)
{
    const TerminalRecord& r = enc.terminal(v);
    if (j < 1 || j > 2 * std::size_t(enc.k))
        throw Error(ErrorCode::IndexOutOfRange,
                    "subdivided source index " + std::to_string(j) + " not in [1, " + std::to_string(2 * enc.k) + "]");
    return 2 * (long long)r.base + enc.index.prefix_sum(r.version, j - 1);
}

/// Storage in machine words; every pointer and counter counts as one word.
struct SizeReport {
    std::size_t header = 0;
    std::size_t index_nodes = 0; // 3 words per internal node
    std::size_t index_leaves = 0;
    std::size_t versions = 0;
    std::size_t terminal_table = 0; // 3 words per terminal

    std::size_t total() const noexcept { return header + index_nodes + index_leaves + versions + terminal_table; }
};

inline constexpr std::size_t kHeaderWords = 8;

inline SizeReport size_report(const Encoding& enc)
{
    return {kHeaderWords, 3 * enc.index.node_count(), enc.index.leaf_count(), enc.index.version_count(),
            3 * enc.terminals.size()};
}

struct BuildOptions {
    RequestedMode mode = RequestedMode::Auto;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::uint64_t modulus = 0; // 0 selects 2^61 - 1; tests may force a tiny one
    int max_attempts = 8;      // reseeds after a detected fingerprint collision
};

struct BuildStats {
    EncodingMode chosen = EncodingMode::General;
    std::uint64_t seed = 0;
    int attempts = 0;
    std::size_t x = 0;                                 // distinct patterns over all of G' (general mode)
    std::optional<std::size_t> pattern_changes;        // single-face walk, over the closed face cycle
    std::vector<std::pair<EncodingMode, std::size_t>> candidates; // words per mode built
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline Encoding skeleton(const SubdividedInstance& sub, const BinaryPatterns& bp, Vertex root_vertex, EncodingMode mode)
{
    Encoding enc;
    enc.mode = mode;
    enc.k = std::uint32_t(sub.base().k());
    enc.index = VersionedPrefixIndex(bp.patterns.row(root_vertex), bp.patterns.length());
    return enc;
}

inline TerminalRecord record(const BinaryPatterns& bp, Vertex v, std::uint32_t version)
{
    return {v, bp.dist_to_first[v] / 2, version};
}

} // namespace detail

/// General mode: one version per node of the pattern tree T', each branched
/// from its parent's version.
inline Encoding encode_general(const SubdividedInstance& sub, const BinaryPatterns& bp, const Fingerprinter& fp,
                               PatternTree* tree_out = nullptr)
{
    PatternTree tree = build_pattern_tree(sub, bp.patterns, edge_labels_from_patterns(sub.graph(), bp.patterns), fp);
    Encoding enc = detail::skeleton(sub, bp, tree.representative[0], EncodingMode::General);
    enc.x = std::uint32_t(tree.size());
    std::vector<std::uint32_t> version(tree.size(), 0);
    for (std::uint32_t u = 1; u < tree.size(); ++u) version[u] = enc.index.update(version[tree.parent[u]], tree.label[u]);
    for (Vertex v : sub.base().terminals()) enc.terminals.push_back(detail::record(bp, v, version[tree.node_of[v]]));
    if (tree_out) *tree_out = std::move(tree);
    return enc;
}

/// Connected-T mode: a BFS tree over the subgraph of G induced by T. Each tree
/// edge changes at most four positions (two per subdivided half-edge); a new
/// version is made only when the pattern changes.
inline Encoding encode_connected(const SubdividedInstance& sub, const BinaryPatterns& bp)
{
    const OSInstance& base = sub.base();
    const PlanarGraph& g = base.graph();
    const auto& t = base.terminals();
    if (t.empty()) throw Error(ErrorCode::ModePreconditionFailed, "connected mode needs at least one terminal");

    std::vector<std::uint8_t> in_t(g.vertex_count(), 0);
    for (Vertex v : t) in_t[v] = 1;
    std::vector<std::uint32_t> version(g.vertex_count(), npos32);
    Encoding enc = detail::skeleton(sub, bp, t.front(), EncodingMode::ConnectedT);
    version[t.front()] = 0;
    std::vector<Vertex> queue{t.front()};
    for (std::size_t h = 0; h < queue.size(); ++h) {
        const Vertex u = queue[h];
        for (Dart d : g.rotation(u)) {
            const Vertex w = g.head(d);
            if (!in_t[w] || version[w] != npos32) continue;
            const auto flips = differing_positions(bp.patterns.row(u), bp.patterns.row(w));
            version[w] = flips.empty() ? version[u] : enc.index.update(version[u], flips);
            queue.push_back(w);
        }
    }
    for (Vertex v : t) {
        if (version[v] == npos32)
            throw Error(ErrorCode::ModePreconditionFailed,
                        "terminal " + std::to_string(v) + " is not connected to terminal " + std::to_string(t.front()) +
                            " inside the subgraph induced by T");
        enc.terminals.push_back(detail::record(bp, v, version[v]));
    }
    return enc;
}

/// Shortest face of G whose vertex set contains every terminal.
inline std::optional<Face> face_containing_terminals(const OSInstance& inst)
{
    const PlanarGraph& g = inst.graph();
    const auto& t = inst.terminals();
    std::vector<std::uint32_t> hits(g.face_count(), 0);
    std::vector<std::uint32_t> stamp(g.face_count(), npos32);
    for (std::uint32_t ti = 0; ti < t.size(); ++ti)
        for (Dart d : g.rotation(t[ti])) {
            const Face f = g.face_of(d);
            if (stamp[f] == ti) continue;
            stamp[f] = ti;
            ++hits[f];
        }
    std::optional<Face> best;
    for (Face f = 0; f < g.face_count(); ++f) {
        if (!t.empty() && hits[f] != t.size()) continue;
        if (!best || g.face_darts(f).size() < g.face_darts(*best).size()) best = f;
    }
    return best;
}

/// Single-face-T mode: walks the chosen face of G' (base vertices and midpoints)
/// once, creating a version whenever the pattern changes. `changes` receives
/// the number of pattern changes around the closed face cycle.
inline Encoding encode_single_face(const SubdividedInstance& sub, const BinaryPatterns& bp,
                                   std::size_t* changes = nullptr)
{
    const OSInstance& base = sub.base();
    const PlanarGraph& g = base.graph();
    auto f = face_containing_terminals(base);
    if (!f) throw Error(ErrorCode::ModePreconditionFailed, "no face of G contains every terminal");

    std::vector<Vertex> walk;
    for (Dart d : g.face_darts(*f)) {
        walk.push_back(g.tail(d));
        walk.push_back(sub.midpoint(edge_of(d)));
    }
    Encoding enc = detail::skeleton(sub, bp, walk.front(), EncodingMode::SingleFaceT);
    std::vector<std::uint32_t> version(g.vertex_count(), npos32);
    std::uint32_t current = 0;
    std::size_t changed = 0;
    version[walk.front()] = 0;
    for (std::size_t s = 1; s <= walk.size(); ++s) {
        const Vertex prev = walk[s - 1], here = walk[s % walk.size()];
        const auto flips = differing_positions(bp.patterns.row(prev), bp.patterns.row(here));
        if (!flips.empty()) ++changed;
        if (s == walk.size()) break;
        if (!flips.empty()) current = enc.index.update(current, flips);
        if (here < g.vertex_count() && version[here] == npos32) version[here] = current;
    }
    for (Vertex v : base.terminals()) enc.terminals.push_back(detail::record(bp, v, version[v]));
    if (changes) *changes = changed;
    return enc;
}

/// Builds the encoding of `inst`. Auto mode builds every applicable mode and
/// keeps the smallest. A detected fingerprint collision triggers a reseed.
inline Encoding build_encoding(const OSInstance& inst, const BuildOptions& opt = {}, BuildStats* stats = nullptr)
{
    const SubdividedInstance sub(inst);
    const BinaryPatterns bp = compute_binary_patterns(sub, opt.threads);
    BuildStats local;
    BuildStats& st = stats ? *stats : local;
    st = {};

    std::optional<Encoding> best;
    auto consider = [&](Encoding enc) {
        const std::size_t words = size_report(enc).total();
        st.candidates.push_back({enc.mode, words});
        if (!best || words < size_report(*best).total()) best = std::move(enc);
    };
    auto attempt = [&](auto&& fn) {
        try {
            consider(fn());
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ModePreconditionFailed || opt.mode != RequestedMode::Auto) throw;
        }
    };

    if (opt.mode == RequestedMode::Auto || opt.mode == RequestedMode::ConnectedT)
        attempt([&] { return encode_connected(sub, bp); });
    if (opt.mode == RequestedMode::Auto || opt.mode == RequestedMode::SingleFaceT)
        attempt([&] {
            std::size_t changes = 0;
            Encoding e = encode_single_face(sub, bp, &changes);
            st.pattern_changes = changes;
            return e;
        });
    if (opt.mode == RequestedMode::Auto || opt.mode == RequestedMode::General) {
        std::uint64_t seed = opt.seed;
        for (int a = 1;; ++a) {
            st.attempts = a;
            try {
                const std::size_t len = bp.patterns.length();
                const Fingerprinter fp = opt.modulus ? Fingerprinter(2 + seed % (opt.modulus - 3), opt.modulus, len)
                                                     : Fingerprinter::from_seed(seed, len);
                Encoding enc = encode_general(sub, bp, fp);
                enc.seed = seed;
                st.x = enc.x;
                consider(std::move(enc));
                break;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::FingerprintCollisionDetected || a >= opt.max_attempts) throw;
                seed = detail::splitmix64(seed);
            }
        }
    }
    if (!best) throw Error(ErrorCode::ModePreconditionFailed, "no encoding mode applies");
    if (best->mode != EncodingMode::General) best->seed = opt.seed;
    st.chosen = best->mode;
    st.seed = best->seed;
    return std::move(*best);
}

} // namespace osmc
