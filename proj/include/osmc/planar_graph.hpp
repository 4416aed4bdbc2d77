#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "osmc/error.hpp"

namespace osmc {

using Vertex = std::uint32_t;
using Dart = std::uint32_t;
using Face = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr std::uint32_t npos32 = std::numeric_limits<std::uint32_t>::max();

// Darts come in pairs 2e, 2e+1 for edge e, so reversal is a single xor.
constexpr Dart rev(Dart d) noexcept { return d ^ 1u; }
constexpr EdgeId edge_of(Dart d) noexcept { return d >> 1; }

/// Combinatorial embedding of a simple connected planar graph.
///
/// `rotation(v)` lists the darts leaving v in counterclockwise order. Faces are
/// traced with next(d) = ccw-successor of rev(d) around head(d); with that rule
/// the face containing dart d lies to its right, so `face_of(d)` is the right
/// face and `face_of(rev(d))` the left face.
class PlanarGraph {
public:
    PlanarGraph() = default;

    std::size_t vertex_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t edge_count() const noexcept { return tail_.size() / 2; }
    std::size_t dart_count() const noexcept { return tail_.size(); }
    std::size_t face_count() const noexcept { return face_offsets_.empty() ? 0 : face_offsets_.size() - 1; }

    Vertex tail(Dart d) const noexcept { return tail_[d]; }
    Vertex head(Dart d) const noexcept { return tail_[rev(d)]; }

    std::span<const Dart> rotation(Vertex v) const noexcept
    {
        return {rotation_.data() + offsets_[v], rotation_.data() + offsets_[v + 1]};
    }
    std::size_t degree(Vertex v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

    Dart next_ccw(Dart d) const noexcept
    {
        const Vertex v = tail_[d];
        std::size_t pos = slot_[d] + 1;
        if (pos == offsets_[v + 1]) pos = offsets_[v];
        return rotation_[pos];
    }
    Dart prev_ccw(Dart d) const noexcept
    {
        const Vertex v = tail_[d];
        std::size_t pos = slot_[d];
        if (pos == offsets_[v]) pos = offsets_[v + 1];
        return rotation_[pos - 1];
    }
    Dart face_next(Dart d) const noexcept { return next_ccw(rev(d)); }

    Face face_of(Dart d) const noexcept { return face_of_[d]; }
    Face right_face(Dart d) const noexcept { return face_of_[d]; }
    Face left_face(Dart d) const noexcept { return face_of_[rev(d)]; }

    std::span<const Dart> face_darts(Face f) const noexcept
    {
        return {face_darts_.data() + face_offsets_[f], face_darts_.data() + face_offsets_[f + 1]};
    }

    Face infinite_face() const noexcept { return infinite_face_; }
    void set_infinite_face(Face f) noexcept { infinite_face_ = f; }

    std::optional<Dart> find_dart(Vertex u, Vertex v) const noexcept
    {
        if (u >= vertex_count() || v >= vertex_count()) return std::nullopt;
        for (Dart d : rotation(u))
            if (head(d) == v) return d;
        return std::nullopt;
    }

    /// Neighbor lists in rotation order, the inverse of build_embedding.
    std::vector<std::vector<Vertex>> neighbor_rotations() const
    {
        std::vector<std::vector<Vertex>> out(vertex_count());
        for (Vertex v = 0; v < vertex_count(); ++v)
            for (Dart d : rotation(v)) out[v].push_back(head(d));
        return out;
    }

private:
    friend PlanarGraph build_embedding(std::size_t, const std::vector<std::vector<Vertex>>&);

    std::vector<std::size_t> offsets_;
    std::vector<Dart> rotation_;
    std::vector<std::size_t> slot_; // position of each dart inside rotation_
    std::vector<Vertex> tail_;
    std::vector<Face> face_of_;
    std::vector<std::size_t> face_offsets_;
    std::vector<Dart> face_darts_;
    Face infinite_face_ = 0;
};

namespace detail {

inline bool connected(std::size_t n, const std::vector<std::vector<Vertex>>& adj)
{
    if (n == 0) return true;
    std::vector<char> seen(n, 0);
    std::vector<Vertex> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
        Vertex v = stack.back();
        stack.pop_back();
        for (Vertex w : adj[v])
            if (!seen[w]) {
                seen[w] = 1;
                ++count;
                stack.push_back(w);
            }
    }
    return count == n;
}

} // namespace detail

/// Builds and validates an embedding from per-vertex ccw neighbor cycles.
/// Throws NotSimple, Disconnected or NonPlanarRotation.
inline PlanarGraph build_embedding(std::size_t n, const std::vector<std::vector<Vertex>>& rotations)
{
    if (rotations.size() != n)
        throw Error(ErrorCode::InvalidInput,
                    "expected " + std::to_string(n) + " rotations, got " + std::to_string(rotations.size()));
    if (n == 0) throw Error(ErrorCode::InvalidInput, "empty graph");

    std::unordered_map<std::uint64_t, EdgeId> edge_ids;
    std::vector<std::uint8_t> seen_sides;
    auto key = [](Vertex a, Vertex b) {
        if (a > b) std::swap(a, b);
        return (std::uint64_t(a) << 32) | b;
    };

    PlanarGraph g;
    for (Vertex u = 0; u < n; ++u) {
        std::vector<Vertex> sorted = rotations[u];
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw Error(ErrorCode::NotSimple, "vertex " + std::to_string(u) + " lists a neighbor twice");
        for (Vertex v : rotations[u]) {
            if (v >= n)
                throw Error(ErrorCode::InvalidInput,
                            "vertex " + std::to_string(u) + " lists out-of-range neighbor " + std::to_string(v));
            if (v == u) throw Error(ErrorCode::NotSimple, "self-loop at vertex " + std::to_string(u));
            auto [it, inserted] = edge_ids.try_emplace(key(u, v), EdgeId(seen_sides.size()));
            if (inserted) {
                seen_sides.push_back(0);
                Vertex lo = std::min(u, v), hi = std::max(u, v);
                g.tail_.push_back(lo);
                g.tail_.push_back(hi);
            }
            seen_sides[it->second] |= (u < v) ? 1 : 2;
        }
    }
    for (EdgeId e = 0; e < seen_sides.size(); ++e)
        if (seen_sides[e] != 3) {
            Vertex a = g.tail_[2 * e], b = g.tail_[2 * e + 1];
            Vertex lister = (seen_sides[e] == 1) ? a : b;
            Vertex other = (lister == a) ? b : a;
            throw Error(ErrorCode::NotSimple, "vertex " + std::to_string(lister) + " lists " + std::to_string(other) +
                                                  " but " + std::to_string(other) + " does not list " +
                                                  std::to_string(lister));
        }

    if (!detail::connected(n, rotations)) throw Error(ErrorCode::Disconnected, "graph is not connected");

    g.offsets_.assign(n + 1, 0);
    for (Vertex u = 0; u < n; ++u) g.offsets_[u + 1] = g.offsets_[u] + rotations[u].size();
    g.rotation_.resize(g.offsets_[n]);
    g.slot_.resize(g.tail_.size());
    for (Vertex u = 0; u < n; ++u)
        for (std::size_t i = 0; i < rotations[u].size(); ++i) {
            Vertex v = rotations[u][i];
            EdgeId e = edge_ids.at(key(u, v));
            Dart d = (u < v) ? 2 * e : 2 * e + 1;
            g.rotation_[g.offsets_[u] + i] = d;
            g.slot_[d] = g.offsets_[u] + i;
        }

    const std::size_t darts = g.tail_.size();
    g.face_of_.assign(darts, npos32);
    g.face_offsets_.push_back(0);
    for (Dart start = 0; start < darts; ++start) {
        if (g.face_of_[start] != npos32) continue;
        Face f = Face(g.face_offsets_.size() - 1);
        Dart d = start;
        do {
            g.face_of_[d] = f;
            g.face_darts_.push_back(d);
            d = g.face_next(d);
        } while (d != start);
        g.face_offsets_.push_back(g.face_darts_.size());
    }
    if (darts == 0) g.face_offsets_.push_back(0); // a lone vertex has one face

    const long long euler = (long long)n - (long long)g.edge_count() + (long long)g.face_count();
    if (euler != 2)
        throw Error(ErrorCode::NonPlanarRotation, "rotation system traces " + std::to_string(g.face_count()) +
                                                      " faces; Euler's formula needs " +
                                                      std::to_string(2 - (long long)n + (long long)g.edge_count()));
    return g;
}

/// The dual of an embedded graph. Dual dart ids coincide with primal dart ids:
/// the dual of primal dart d runs from the face right of d to the face left of d.
class DualGraph {
public:
    explicit DualGraph(const PlanarGraph& g) : primal_(&g)
    {
        const std::size_t faces = g.face_count();
        offsets_.assign(faces + 1, 0);
        for (Face f = 0; f < faces; ++f) offsets_[f + 1] = offsets_[f] + g.face_darts(f).size();
        rotation_.resize(offsets_[faces]);
        slot_.assign(g.dart_count(), 0);
        // Walking a face with it on the right goes clockwise around it, so the
        // ccw order of outgoing dual darts is the reversed trace.
        for (Face f = 0; f < faces; ++f) {
            auto trace = g.face_darts(f);
            for (std::size_t i = 0; i < trace.size(); ++i) {
                Dart d = trace[trace.size() - 1 - i];
                rotation_[offsets_[f] + i] = d;
                slot_[d] = offsets_[f] + i;
            }
        }
    }

    std::size_t vertex_count() const noexcept { return offsets_.size() - 1; }
    std::size_t dart_count() const noexcept { return primal_->dart_count(); }
    Face tail(Dart d) const noexcept { return primal_->right_face(d); }
    Face head(Dart d) const noexcept { return primal_->left_face(d); }
    Dart primal_of(Dart dual) const noexcept { return dual; }
    Face infinite_face() const noexcept { return primal_->infinite_face(); }
    std::size_t degree(Face f) const noexcept { return offsets_[f + 1] - offsets_[f]; }

    std::span<const Dart> rotation(Face f) const noexcept
    {
        return {rotation_.data() + offsets_[f], rotation_.data() + offsets_[f + 1]};
    }
    Dart next_ccw(Dart d) const noexcept
    {
        const Face f = tail(d);
        std::size_t pos = slot_[d] + 1;
        if (pos == offsets_[f + 1]) pos = offsets_[f];
        return rotation_[pos];
    }

    /// Face id (of the dual embedding) for every dual dart, traced with the same
    /// successor rule as the primal. Each such face surrounds one primal vertex.
    std::vector<std::uint32_t> trace_faces(std::size_t* count = nullptr) const
    {
        std::vector<std::uint32_t> face(dart_count(), npos32);
        std::uint32_t next_id = 0;
        for (Dart s = 0; s < dart_count(); ++s) {
            if (face[s] != npos32) continue;
            Dart d = s;
            do {
                face[d] = next_id;
                d = next_ccw(rev(d));
            } while (d != s);
            ++next_id;
        }
        if (count) *count = next_id;
        return face;
    }

    /// The primal dart obtained by dualizing dual dart d once more: it runs from
    /// the primal vertex right of d to the one left of d, which is rev(d).
    Dart dual_of_dual(Dart d, const std::vector<std::uint32_t>& dual_faces,
                      const std::vector<Vertex>& vertex_of_dual_face) const
    {
        Vertex from = vertex_of_dual_face[dual_faces[d]];
        Vertex to = vertex_of_dual_face[dual_faces[rev(d)]];
        auto found = primal_->find_dart(from, to);
        return found ? *found : npos32;
    }

private:
    const PlanarGraph* primal_;
    std::vector<std::size_t> offsets_;
    std::vector<Dart> rotation_;
    std::vector<std::size_t> slot_;
};

inline DualGraph build_dual(const PlanarGraph& g) { return DualGraph(g); }

} // namespace osmc
