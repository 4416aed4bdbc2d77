#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "osmc/distances.hpp"
#include "osmc/error.hpp"
#include "osmc/instance.hpp"
#include "osmc/planar_graph.hpp"

namespace osmc {

/// A_i = { v in G' : p^_v[i] = -1 }, with the 1-based index i in [1, 2k-1].
struct Cut {
    std::size_t index = 0;
    std::vector<std::uint8_t> inside; // membership over subdivided vertices

    bool contains(Vertex v) const noexcept { return inside[v] != 0; }
};

/// True iff the vertices with `inside[v] == side` induce a connected subgraph.
inline bool side_connected(const PlanarGraph& g, const std::vector<std::uint8_t>& inside, std::uint8_t side)
{
    const std::size_t n = g.vertex_count();
    Vertex start = npos32;
    std::size_t total = 0;
    for (Vertex v = 0; v < n; ++v)
        if (inside[v] == side) {
            if (start == npos32) start = v;
            ++total;
        }
    if (total == 0) return true;
    std::vector<char> seen(n, 0);
    std::vector<Vertex> stack{start};
    seen[start] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        Vertex v = stack.back();
        stack.pop_back();
        for (Dart d : g.rotation(v)) {
            Vertex w = g.head(d);
            if (!seen[w] && inside[w] == side) {
                seen[w] = 1;
                ++reached;
                stack.push_back(w);
            }
        }
    }
    return reached == total;
}

inline Cut make_cut(const PatternMatrix& binary, std::size_t index)
{
    Cut c{index, std::vector<std::uint8_t>(binary.rows())};
    for (std::size_t v = 0; v < binary.rows(); ++v) c.inside[v] = binary.get(v, index - 1) < 0 ? 1 : 0;
    return c;
}

/// One cut per pattern position. Throws DisconnectedCutSide when either side of a
/// cut is not connected, or when s'_{i+1} / s'_i fall on the wrong side.
inline std::vector<Cut> compute_cuts(const SubdividedInstance& sub, const PatternMatrix& binary)
{
    if (binary.mode() != PatternMode::Binary)
        throw Error(ErrorCode::ModeMismatch, "cuts are defined on binary patterns");
    std::vector<Cut> cuts;
    const auto& s = sub.sources();
    for (std::size_t i = 1; i <= binary.length(); ++i) {
        Cut c = make_cut(binary, i);
        if (!c.contains(s[i]) || c.contains(s[i - 1]))
            throw Error(ErrorCode::DisconnectedCutSide, "cut " + std::to_string(i) + " misplaces its face edge");
        if (!side_connected(sub.graph(), c.inside, 1) || !side_connected(sub.graph(), c.inside, 0))
            throw Error(ErrorCode::DisconnectedCutSide, "a side of cut " + std::to_string(i) + " is disconnected");
        cuts.push_back(std::move(c));
    }
    return cuts;
}

/// The dual cycle delta(A_i)*, stored as darts in cycle order starting with
/// (s'_{i+1} s'_i)*. `faces[l]` is the tail face of `darts[l]`, so faces[1] is
/// the infinite face.
struct Bisector {
    std::size_t index = 0;
    std::vector<Dart> darts;
    std::vector<Face> faces;

    std::size_t size() const noexcept { return darts.size(); }
};

inline Bisector extract_bisector(const SubdividedInstance& sub, const Cut& cut)
{
    const PlanarGraph& g = sub.graph();
    const auto& s = sub.sources();
    const std::size_t i = cut.index;
    auto first = g.find_dart(s[i], s[i - 1]);
    if (!first) throw Error(ErrorCode::InvalidInput, "missing face edge for bisector " + std::to_string(i));

    std::vector<Dart> out_of(g.face_count(), npos32);
    std::vector<std::uint8_t> in_degree(g.face_count(), 0);
    std::size_t boundary = 0;
    for (Dart d = 0; d < g.dart_count(); ++d) {
        if (!cut.contains(g.tail(d)) || cut.contains(g.head(d))) continue;
        ++boundary;
        const Face from = g.right_face(d), to = g.left_face(d);
        if (out_of[from] != npos32 || in_degree[to] != 0)
            throw Error(ErrorCode::NotASimpleCycle,
                        "bisector " + std::to_string(i) + " visits face " + std::to_string(out_of[from] != npos32 ? from : to) + " twice");
        out_of[from] = d;
        in_degree[to] = 1;
    }

    Bisector b{i, {}, {}};
    Dart d = *first;
    do {
        b.darts.push_back(d);
        b.faces.push_back(g.right_face(d));
        d = out_of[g.left_face(d)];
        if (d == npos32 || b.darts.size() > boundary)
            throw Error(ErrorCode::NotASimpleCycle, "bisector " + std::to_string(i) + " does not close");
    } while (d != *first);
    if (b.darts.size() != boundary)
        throw Error(ErrorCode::NotASimpleCycle, "bisector " + std::to_string(i) + " splits into several cycles");
    return b;
}

inline std::vector<Bisector> extract_bisectors(const SubdividedInstance& sub, const std::vector<Cut>& cuts)
{
    std::vector<Bisector> out;
    out.reserve(cuts.size());
    for (const Cut& c : cuts) out.push_back(extract_bisector(sub, c));
    return out;
}

enum class Side : std::uint8_t { Left, Right, OnCurve };

/// Side of the dual dart d with respect to the bisector of `cut`: A_i lies left.
inline Side side_of(const PlanarGraph& g, const Cut& cut, Dart d) noexcept
{
    const bool a = cut.contains(g.tail(d)), b = cut.contains(g.head(d));
    if (a && b) return Side::Left;
    if (!a && !b) return Side::Right;
    return Side::OnCurve;
}

/// A maximal common subpath of two bisectors, orientation ignored.
struct CrossingPart {
    std::vector<Face> faces;      // in beta_i order
    std::size_t pos_i = 0;        // position of the first face along beta_i, counted from f_inf
    std::size_t pos_j = 0;        // smallest position of its faces along beta_j, counted from f_inf
    bool contains_infinite = false;
    bool crosses = false;
};

struct CrossingReport {
    std::size_t i = 0, j = 0;
    std::vector<CrossingPart> parts;
    std::size_t r = 0;                 // crossing parts away from f_inf
    std::size_t total_crossings = 0;   // including a crossing at f_inf (parity check)
    std::size_t shared_arcs = 0;       // same-direction shared darts; nonzero breaks arc-disjointness
    std::size_t ambiguous_sides = 0;   // neighbouring darts lying on beta_i itself
    std::vector<std::size_t> order_i;  // crossing part ids sorted along beta_i
    std::vector<std::size_t> order_j;  // the same parts sorted along beta_j
};

/// Enumerates crossings of beta_i against a fixed beta_j. Preparing beta_j once
/// and reusing it for all i keeps all-pairs enumeration linear per pair.
class CrossingEnumerator {
public:
    explicit CrossingEnumerator(const PlanarGraph& g)
        : g_(&g), pos_in_j_(g.face_count(), npos32), in_j_(g.dart_count(), 0)
    {
    }

    void prepare(const Bisector& bj)
    {
        clear();
        bj_ = &bj;
        const std::size_t len = bj.size();
        for (std::size_t l = 0; l < len; ++l) {
            pos_in_j_[bj.faces[l]] = std::uint32_t(l);
            in_j_[bj.darts[l]] = 1;
        }
    }

    CrossingReport enumerate(const Bisector& bi, const Cut& cut_i) const
    {
        if (!bj_) throw Error(ErrorCode::InvalidInput, "CrossingEnumerator used before prepare()");
        const Bisector& bj = *bj_;
        if (bi.index == bj.index)
            throw Error(ErrorCode::InvalidInput, "a bisector is not compared with itself");
        const PlanarGraph& g = *g_;
        const Face inf = g.infinite_face();
        CrossingReport rep;
        rep.i = bi.index;
        rep.j = bj.index;

        const std::size_t len = bi.size();
        const std::size_t len_j = bj.size();
        auto from_inf = [](std::size_t l, std::size_t n) { return (l + n - 1) % n; };

        std::vector<std::uint8_t> rev_shared(len, 0);
        std::size_t rev_count = 0;
        for (std::size_t l = 0; l < len; ++l) {
            if (in_j_[bi.darts[l]]) ++rep.shared_arcs;
            if (in_j_[rev(bi.darts[l])]) rev_shared[l] = 1, ++rev_count;
        }

        auto classify = [&](CrossingPart& part, std::size_t first_l, std::size_t last_l) {
            // beta_j runs the part backwards: it enters at the last face, leaves at the first.
            const std::size_t enter_pos = pos_in_j_[bi.faces[last_l]];
            const std::size_t leave_pos = pos_in_j_[bi.faces[first_l]];
            const Dart before = bj.darts[(enter_pos + len_j - 1) % len_j];
            const Dart after = bj.darts[leave_pos];
            const Side a = side_of(g, cut_i, before), b = side_of(g, cut_i, after);
            if (a == Side::OnCurve || b == Side::OnCurve) ++rep.ambiguous_sides;
            part.crosses = a != Side::OnCurve && b != Side::OnCurve && a != b;
        };

        if (rev_count == len) {
            CrossingPart whole;
            whole.faces = bi.faces;
            whole.contains_infinite = true;
            rep.parts.push_back(std::move(whole));
            return rep;
        }

        std::size_t start = 0;
        while (rev_shared[(start + len - 1) % len]) ++start;
        std::optional<std::size_t> open_first;
        std::size_t open_last = 0;
        CrossingPart current;
        auto close = [&] {
            if (!open_first) return;
            current.pos_i = from_inf(*open_first, len);
            current.pos_j = len_j;
            for (Face f : current.faces) {
                current.pos_j = std::min<std::size_t>(current.pos_j, from_inf(pos_in_j_[f], len_j));
                if (f == inf) current.contains_infinite = true;
            }
            classify(current, *open_first, open_last);
            rep.parts.push_back(std::move(current));
            current = CrossingPart{};
            open_first.reset();
        };
        for (std::size_t step = 0; step < len; ++step) {
            const std::size_t l = (start + step) % len;
            if (pos_in_j_[bi.faces[l]] == npos32) {
                close();
                continue;
            }
            const std::size_t prev = (l + len - 1) % len;
            if (!(open_first && rev_shared[prev])) {
                close();
                open_first = l;
            }
            open_last = l;
            current.faces.push_back(bi.faces[l]);
        }
        close();

        for (std::size_t p = 0; p < rep.parts.size(); ++p) {
            const CrossingPart& part = rep.parts[p];
            if (!part.crosses) continue;
            ++rep.total_crossings;
            if (part.contains_infinite) continue;
            ++rep.r;
            rep.order_i.push_back(p);
            rep.order_j.push_back(p);
        }
        std::sort(rep.order_i.begin(), rep.order_i.end(),
                  [&](std::size_t a, std::size_t b) { return rep.parts[a].pos_i < rep.parts[b].pos_i; });
        std::sort(rep.order_j.begin(), rep.order_j.end(),
                  [&](std::size_t a, std::size_t b) { return rep.parts[a].pos_j < rep.parts[b].pos_j; });
        return rep;
    }

private:
    void clear()
    {
        if (!bj_) return;
        for (std::size_t l = 0; l < bj_->size(); ++l) {
            pos_in_j_[bj_->faces[l]] = npos32;
            in_j_[bj_->darts[l]] = 0;
        }
    }

    const PlanarGraph* g_;
    const Bisector* bj_ = nullptr;
    std::vector<std::uint32_t> pos_in_j_;
    std::vector<std::uint8_t> in_j_;
};

inline CrossingReport enumerate_crossings(const PlanarGraph& g, const Bisector& bi, const Bisector& bj,
                                          const Cut& cut_i)
{
    CrossingEnumerator e(g);
    e.prepare(bj);
    return e.enumerate(bi, cut_i);
}

/// True iff the crossing parts appear along beta_j in the reverse of their order
/// along beta_i.
inline bool verify_crossing_order(const CrossingReport& rep)
{
    if (rep.order_i.size() != rep.order_j.size()) return false;
    return std::equal(rep.order_i.begin(), rep.order_i.end(), rep.order_j.rbegin());
}

struct CrossingTotals {
    std::size_t t = 0;
    std::size_t max_r = 0;
    std::size_t pairs = 0;
    std::map<std::size_t, std::size_t> histogram; // r -> number of pairs
    std::size_t max_r_i = 0, max_r_j = 0;          // a pair attaining max_r
};

inline CrossingTotals crossing_totals(const std::vector<CrossingReport>& reports)
{
    CrossingTotals tot;
    for (const auto& rep : reports) {
        tot.t += rep.r;
        ++tot.pairs;
        ++tot.histogram[rep.r];
        if (rep.r > tot.max_r) {
            tot.max_r = rep.r;
            tot.max_r_i = rep.i;
            tot.max_r_j = rep.j;
        }
    }
    return tot;
}

/// All unordered pairs (i < j) of bisectors.
inline std::vector<CrossingReport> enumerate_all_crossings(const PlanarGraph& g, const std::vector<Bisector>& bs,
                                                           const std::vector<Cut>& cuts)
{
    std::vector<CrossingReport> out;
    CrossingEnumerator e(g);
    for (std::size_t j = 0; j < bs.size(); ++j) {
        e.prepare(bs[j]);
        for (std::size_t i = 0; i < j; ++i) out.push_back(e.enumerate(bs[i], cuts[i]));
    }
    return out;
}

/// For every G' edge, the pattern positions (0-based) that differ across it,
/// read off the bisectors that use either of its darts.
inline std::vector<std::vector<std::uint32_t>> edge_labels_from_bisectors(const PlanarGraph& g,
                                                                          const std::vector<Bisector>& bs)
{
    std::vector<std::vector<std::uint32_t>> labels(g.edge_count());
    for (const Bisector& b : bs)
        for (Dart d : b.darts) labels[edge_of(d)].push_back(std::uint32_t(b.index - 1));
    for (auto& l : labels) std::sort(l.begin(), l.end());
    return labels;
}

} // namespace osmc
