#pragma once

#include <bit>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "osmc/distances.hpp"
#include "osmc/error.hpp"
#include "osmc/fingerprint.hpp"
#include "osmc/instance.hpp"

namespace osmc {

/// BFS spanning tree of a graph; parent_edge[root] = npos32.
struct SpanningTree {
    Vertex root = 0;
    std::vector<Vertex> parent;
    std::vector<EdgeId> parent_edge;
    std::vector<Vertex> order; // BFS order, parents first
};

inline SpanningTree bfs_tree(const PlanarGraph& g, Vertex root)
{
    SpanningTree t{root, std::vector<Vertex>(g.vertex_count(), npos32),
                   std::vector<EdgeId>(g.vertex_count(), npos32), {}};
    t.order.reserve(g.vertex_count());
    std::vector<char> seen(g.vertex_count(), 0);
    seen[root] = 1;
    t.order.push_back(root);
    for (std::size_t h = 0; h < t.order.size(); ++h) {
        const Vertex v = t.order[h];
        for (Dart d : g.rotation(v)) {
            const Vertex w = g.head(d);
            if (seen[w]) continue;
            seen[w] = 1;
            t.parent[w] = v;
            t.parent_edge[w] = edge_of(d);
            t.order.push_back(w);
        }
    }
    return t;
}

/// Positions where two packed rows differ.
inline std::vector<std::uint32_t> differing_positions(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b)
{
    std::vector<std::uint32_t> out;
    for (std::size_t w = 0; w < a.size(); ++w)
        for (std::uint64_t x = a[w] ^ b[w]; x; x &= x - 1)
            out.push_back(std::uint32_t(w * 64 + std::size_t(std::countr_zero(x))));
    return out;
}

/// The deduplicated tree T' over distinct binary patterns. Node 0 is the root;
/// every parent precedes its children.
struct PatternTree {
    std::size_t length = 0;
    std::vector<std::uint64_t> root_bits;
    std::vector<std::uint32_t> parent;              // npos32 for the root
    std::vector<std::vector<std::uint32_t>> label;  // positions flipped relative to the parent
    std::vector<Vertex> representative;             // first G' vertex reaching each node
    std::vector<std::uint32_t> node_of;             // G' vertex -> node
    std::size_t verified_hits = 0;                  // dictionary hits checked exactly

    std::size_t size() const noexcept { return parent.size(); }

    /// Pattern of a node, rebuilt by applying labels from the root.
    std::vector<std::uint64_t> bits_of(std::uint32_t node) const
    {
        std::vector<std::uint64_t> bits = root_bits;
        for (std::uint32_t u = node; u != 0; u = parent[u])
            for (std::uint32_t p : label[u]) bits[p >> 6] ^= std::uint64_t(1) << (p & 63);
        return bits;
    }
};

/// Walks the BFS tree of G' from s'_1 depth-first, keeping one fingerprint tree
/// in sync with the current pattern (flips applied going down, undone going up).
/// A vertex whose fingerprint is already in the dictionary is merged into that
/// node after an exact comparison; its subtree hangs off the representative.
///
/// `edge_labels` gives, per G' edge, the positions that differ across it.
/// Throws FingerprintCollisionDetected if two different patterns share a
/// fingerprint.
inline PatternTree build_pattern_tree(const SubdividedInstance& sub, const PatternMatrix& patterns,
                                      const std::vector<std::vector<std::uint32_t>>& edge_labels,
                                      const Fingerprinter& fp)
{
    const PlanarGraph& g = sub.graph();
    if (patterns.mode() != PatternMode::Binary || patterns.rows() != g.vertex_count())
        throw Error(ErrorCode::ModeMismatch, "pattern tree needs binary patterns of every subdivided vertex");
    if (edge_labels.size() != g.edge_count())
        throw Error(ErrorCode::InvalidInput, "expected one label per subdivided edge");

    const SpanningTree st = bfs_tree(g, sub.sources()[0]);
    std::vector<std::vector<Vertex>> children(g.vertex_count());
    for (Vertex v : st.order)
        if (st.parent[v] != npos32) children[st.parent[v]].push_back(v);

    PatternTree t;
    t.length = patterns.length();
    const auto root_row = patterns.row(st.root);
    t.root_bits.assign(root_row.begin(), root_row.end());
    t.node_of.assign(g.vertex_count(), npos32);

    std::vector<std::uint64_t> bits = t.root_bits;
    FingerprintTree ftree(fp, bits, t.length);
    std::unordered_map<std::uint64_t, std::uint32_t> dict;
    auto toggle = [&](EdgeId e) {
        for (std::uint32_t p : edge_labels[e]) {
            if (p >= t.length) throw Error(ErrorCode::InvalidInput, "edge label position out of range");
            ftree.flip(p);
            bits[p >> 6] ^= std::uint64_t(1) << (p & 63);
        }
    };
    auto visit = [&](Vertex v) {
        const std::uint64_t key = ftree.root().value;
        if (auto it = dict.find(key); it != dict.end()) {
            const auto rep = patterns.row(t.representative[it->second]);
            ++t.verified_hits;
            if (!std::equal(bits.begin(), bits.end(), rep.begin()))
                throw Error(ErrorCode::FingerprintCollisionDetected,
                            "vertices " + std::to_string(t.representative[it->second]) + " and " + std::to_string(v) +
                                " share a fingerprint but not a pattern");
            t.node_of[v] = it->second;
            return;
        }
        const auto id = std::uint32_t(t.parent.size());
        if (v == st.root) {
            t.parent.push_back(npos32);
            t.label.emplace_back();
        } else {
            const std::uint32_t up = t.node_of[st.parent[v]];
            t.parent.push_back(up);
            t.label.push_back(differing_positions(bits, patterns.row(t.representative[up])));
        }
        t.representative.push_back(v);
        t.node_of[v] = id;
        dict.emplace(key, id);
    };

    // Iterative DFS: (vertex, next child index).
    std::vector<std::pair<Vertex, std::size_t>> stack{{st.root, 0}};
    visit(st.root);
    while (!stack.empty()) {
        auto& [v, next] = stack.back();
        if (next < children[v].size()) {
            const Vertex c = children[v][next++];
            toggle(st.parent_edge[c]);
            visit(c);
            stack.push_back({c, 0});
        } else {
            if (st.parent_edge[v] != npos32) toggle(st.parent_edge[v]);
            stack.pop_back();
        }
    }
    return t;
}

/// Per G' edge, the positions that differ between its endpoints' patterns.
inline std::vector<std::vector<std::uint32_t>> edge_labels_from_patterns(const PlanarGraph& g,
                                                                         const PatternMatrix& patterns)
{
    std::vector<std::vector<std::uint32_t>> labels(g.edge_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        labels[e] = differing_positions(patterns.row(g.tail(2 * e)), patterns.row(g.head(2 * e)));
    return labels;
}

} // namespace osmc
