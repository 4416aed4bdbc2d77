#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "osmc/error.hpp"
#include "osmc/planar_graph.hpp"

namespace osmc {

/// Raw instance as read from an `.osg` file, before any validation.
struct InstanceSpec {
    std::size_t n = 0;
    std::vector<std::vector<Vertex>> rotations;
    std::vector<Vertex> outer_face;
    std::vector<Vertex> terminals;

    bool operator==(const InstanceSpec&) const = default;
};

struct Diagnostic {
    ErrorCode code;
    std::string message;
    std::optional<Vertex> vertex; // rotation entry the problem is anchored at, if any
};

struct ValidationReport {
    std::vector<Diagnostic> issues;
    bool mirrored = false; // outer_face was listed clockwise; rotations must be reversed

    bool ok() const noexcept { return issues.empty(); }
};

/// An Okamura-Seymour instance: embedded graph, the source face S (which is the
/// designated infinite face, traced s_1 -> s_2 -> ... with the face on the right
/// of every s_i s_{i+1}) and the terminal set T.
class OSInstance {
public:
    const PlanarGraph& graph() const noexcept { return graph_; }
    const std::vector<Vertex>& sources() const noexcept { return sources_; }
    const std::vector<Vertex>& terminals() const noexcept { return terminals_; }
    std::size_t k() const noexcept { return sources_.size(); }

    /// s_i with the 1-based index used throughout the query interface.
    Vertex source(std::size_t i) const
    {
        if (i < 1 || i > sources_.size())
            throw Error(ErrorCode::IndexOutOfRange, "source index " + std::to_string(i) + " not in [1, " +
                                                        std::to_string(sources_.size()) + "]");
        return sources_[i - 1];
    }

    /// The dart s_i -> s_{i+1} (0-based i, indices mod k).
    Dart boundary_dart(std::size_t i) const { return boundary_darts_[i % boundary_darts_.size()]; }

    InstanceSpec to_spec() const { return {graph_.vertex_count(), graph_.neighbor_rotations(), sources_, terminals_}; }

private:
    friend OSInstance make_instance(const InstanceSpec&);
    friend OSInstance make_instance_unchecked(PlanarGraph, std::vector<Vertex>, std::vector<Vertex>);

    PlanarGraph graph_;
    std::vector<Vertex> sources_;
    std::vector<Vertex> terminals_;
    std::vector<Dart> boundary_darts_;
};

namespace detail {

// Matches the face right of s_1 -> s_2 against S; returns the darts s_i -> s_{i+1}.
inline std::optional<std::vector<Dart>> match_face(const PlanarGraph& g, const std::vector<Vertex>& s)
{
    const std::size_t k = s.size();
    std::vector<Dart> darts;
    darts.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        auto d = g.find_dart(s[i], s[(i + 1) % k]);
        if (!d) return std::nullopt;
        darts.push_back(*d);
    }
    const Face f = g.face_of(darts[0]);
    if (g.face_darts(f).size() != k) return std::nullopt;
    for (std::size_t i = 0; i < k; ++i) {
        if (g.face_of(darts[i]) != f) return std::nullopt;
        if (g.face_next(darts[i]) != darts[(i + 1) % k]) return std::nullopt;
    }
    return darts;
}

inline std::vector<std::vector<Vertex>> mirrored(std::vector<std::vector<Vertex>> rotations)
{
    for (auto& r : rotations) std::reverse(r.begin(), r.end());
    return rotations;
}

} // namespace detail

/// Checks every instance invariant and reports all violations found. Structural
/// failures of the graph itself stop the scan since later checks depend on it.
inline ValidationReport validate_instance(const InstanceSpec& spec)
{
    ValidationReport report;
    auto fail = [&](ErrorCode c, std::string msg, std::optional<Vertex> v = std::nullopt) {
        report.issues.push_back({c, std::move(msg), v});
    };

    if (spec.n == 0) {
        fail(ErrorCode::InvalidInput, "n must be positive");
        return report;
    }
    if (spec.rotations.size() != spec.n) {
        fail(ErrorCode::InvalidInput, "expected " + std::to_string(spec.n) + " rotations, got " +
                                          std::to_string(spec.rotations.size()));
        return report;
    }

    bool structural_ok = true;
    for (Vertex u = 0; u < spec.n; ++u) {
        std::vector<Vertex> sorted = spec.rotations[u];
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            fail(ErrorCode::NotSimple, "vertex " + std::to_string(u) + " lists a neighbor twice (parallel edge)", u);
            structural_ok = false;
        }
        for (Vertex v : spec.rotations[u]) {
            if (v >= spec.n) {
                fail(ErrorCode::InvalidInput,
                     "vertex " + std::to_string(u) + " lists out-of-range neighbor " + std::to_string(v), u);
                structural_ok = false;
            } else if (v == u) {
                fail(ErrorCode::NotSimple, "self-loop at vertex " + std::to_string(u), u);
                structural_ok = false;
            } else {
                const auto& back = spec.rotations[v];
                if (std::find(back.begin(), back.end(), u) == back.end()) {
                    fail(ErrorCode::NotSimple,
                         "vertex " + std::to_string(u) + " lists " + std::to_string(v) + " but " +
                             std::to_string(v) + " does not list " + std::to_string(u),
                         u);
                    structural_ok = false;
                }
            }
        }
    }
    if (!structural_ok) return report;

    if (!detail::connected(spec.n, spec.rotations)) {
        std::vector<char> seen(spec.n, 0);
        std::vector<Vertex> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            Vertex v = stack.back();
            stack.pop_back();
            for (Vertex w : spec.rotations[v])
                if (!seen[w]) seen[w] = 1, stack.push_back(w);
        }
        Vertex far = Vertex(std::find(seen.begin(), seen.end(), 0) - seen.begin());
        fail(ErrorCode::Disconnected, "vertex " + std::to_string(far) + " is unreachable from vertex 0", far);
        return report;
    }

    PlanarGraph g;
    try {
        g = build_embedding(spec.n, spec.rotations);
    } catch (const Error& e) {
        fail(e.code(), e.message());
        return report;
    }

    const auto& s = spec.outer_face;
    if (s.size() < 3) {
        fail(ErrorCode::KTooSmall, "outer_face has " + std::to_string(s.size()) + " vertices; k >= 3 is required");
    } else {
        bool s_ok = true;
        std::vector<Vertex> sorted = s;
        std::sort(sorted.begin(), sorted.end());
        for (Vertex v : s)
            if (v >= spec.n) {
                fail(ErrorCode::InvalidInput, "outer_face vertex " + std::to_string(v) + " out of range");
                s_ok = false;
            }
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            fail(ErrorCode::SNotFullFace, "outer_face repeats a vertex");
            s_ok = false;
        }
        if (s_ok) {
            for (std::size_t i = 0; i < s.size() && s_ok; ++i) {
                Vertex a = s[i], b = s[(i + 1) % s.size()];
                if (!g.find_dart(a, b)) {
                    fail(ErrorCode::SNotFullFace, "outer_face vertices " + std::to_string(a) + " and " +
                                                      std::to_string(b) + " are consecutive but not adjacent",
                         a);
                    s_ok = false;
                }
            }
        }
        if (s_ok && !detail::match_face(g, s)) {
            PlanarGraph mirror = build_embedding(spec.n, detail::mirrored(spec.rotations));
            if (detail::match_face(mirror, s)) {
                report.mirrored = true;
            } else {
                fail(ErrorCode::SNotFullFace,
                     "outer_face is not the complete vertex sequence of a single face of the embedding");
            }
        }
    }

    std::vector<Vertex> t = spec.terminals;
    std::sort(t.begin(), t.end());
    for (Vertex v : t)
        if (v >= spec.n) fail(ErrorCode::InvalidInput, "terminal " + std::to_string(v) + " out of range");
    if (std::adjacent_find(t.begin(), t.end()) != t.end()) fail(ErrorCode::InvalidInput, "terminals repeat a vertex");
    return report;
}

/// Validates and builds an instance; throws the first reported issue.
inline OSInstance make_instance(const InstanceSpec& spec)
{
    ValidationReport report = validate_instance(spec);
    if (!report.ok()) throw Error(report.issues.front().code, report.issues.front().message);

    OSInstance inst;
    inst.graph_ = build_embedding(spec.n, report.mirrored ? detail::mirrored(spec.rotations) : spec.rotations);
    inst.sources_ = spec.outer_face;
    inst.terminals_ = spec.terminals;
    std::sort(inst.terminals_.begin(), inst.terminals_.end());
    inst.boundary_darts_ = *detail::match_face(inst.graph_, inst.sources_);
    inst.graph_.set_infinite_face(inst.graph_.face_of(inst.boundary_darts_[0]));
    return inst;
}

/// Builds an instance from an already-embedded graph (used by subdivide);
/// caller guarantees the invariants.
inline OSInstance make_instance_unchecked(PlanarGraph g, std::vector<Vertex> sources, std::vector<Vertex> terminals)
{
    OSInstance inst;
    inst.graph_ = std::move(g);
    inst.sources_ = std::move(sources);
    inst.terminals_ = std::move(terminals);
    auto darts = detail::match_face(inst.graph_, inst.sources_);
    if (!darts) throw Error(ErrorCode::SNotFullFace, "sources do not trace a face");
    inst.boundary_darts_ = std::move(*darts);
    inst.graph_.set_infinite_face(inst.graph_.face_of(inst.boundary_darts_[0]));
    return inst;
}

/// G' obtained by subdividing every edge once. Base vertex v keeps id v; the
/// midpoint of base edge e gets id n + e. S' interleaves s_i and the midpoint
/// w_i of {s_i, s_{i+1}}.
class SubdividedInstance {
public:
    explicit SubdividedInstance(const OSInstance& base) : base_(&base)
    {
        const PlanarGraph& g = base.graph();
        const std::size_t n = g.vertex_count();
        std::vector<std::vector<Vertex>> rot(n + g.edge_count());
        for (Vertex v = 0; v < n; ++v)
            for (Dart d : g.rotation(v)) rot[v].push_back(Vertex(n + edge_of(d)));
        for (EdgeId e = 0; e < g.edge_count(); ++e) rot[n + e] = {g.tail(2 * e), g.head(2 * e)};

        std::vector<Vertex> s2;
        s2.reserve(2 * base.k());
        for (std::size_t i = 0; i < base.k(); ++i) {
            s2.push_back(base.sources()[i]);
            s2.push_back(Vertex(n + edge_of(base.boundary_dart(i))));
        }
        sub_ = make_instance_unchecked(build_embedding(rot.size(), rot), std::move(s2), base.terminals());
    }

    const OSInstance& base() const noexcept { return *base_; }
    const OSInstance& instance() const noexcept { return sub_; }
    const PlanarGraph& graph() const noexcept { return sub_.graph(); }
    const std::vector<Vertex>& sources() const noexcept { return sub_.sources(); }
    std::size_t base_vertex_count() const noexcept { return base_->graph().vertex_count(); }
    std::size_t pattern_length() const noexcept { return sub_.k() - 1; }

    Vertex midpoint(EdgeId base_edge) const noexcept { return Vertex(base_vertex_count() + base_edge); }
    bool is_midpoint(Vertex v) const noexcept { return v >= base_vertex_count(); }
    EdgeId base_edge_of(Vertex midpoint) const noexcept { return EdgeId(midpoint - base_vertex_count()); }

private:
    const OSInstance* base_;
    OSInstance sub_;
};

inline SubdividedInstance subdivide(const OSInstance& inst) { return SubdividedInstance(inst); }

} // namespace osmc
