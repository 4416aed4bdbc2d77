#include <map>
#include <set>

#include <gtest/gtest.h>

#include "corpus.hpp"
#include "oracles.hpp"
#include "osmc/bisectors.hpp"
#include "osmc/pattern_tree.hpp"

using namespace osmc;

namespace {

struct Prepared {
    OSInstance inst;
    std::unique_ptr<SubdividedInstance> sub;
    BinaryPatterns bp;
    std::vector<Cut> cuts;
    std::vector<Bisector> bs;

    explicit Prepared(const InstanceSpec& spec) : inst(make_instance(spec))
    {
        sub = std::make_unique<SubdividedInstance>(inst);
        bp = compute_binary_patterns(*sub);
        cuts = compute_cuts(*sub, bp.patterns);
        bs = extract_bisectors(*sub, cuts);
    }
};

// Position of base-face edge {s'_j, s'_{j+1}} (1-based j) in a subdivided cycle.
std::size_t face_edge_position(const SubdividedInstance& sub, EdgeId e)
{
    const auto& s = sub.sources();
    const PlanarGraph& g = sub.graph();
    const std::set<Vertex> ends{g.tail(2 * e), g.head(2 * e)};
    for (std::size_t j = 0; j < s.size(); ++j)
        if (ends == std::set<Vertex>{s[j], s[(j + 1) % s.size()]}) return j + 1;
    return 0;
}

} // namespace

TEST(Cuts, SubdividedSquareFirstCut)
{
    // On the 8-cycle s'_1..s'_8, A_1 holds the vertices strictly closer to s'_2.
    Prepared p(osmc::gen_cycle(4));
    const auto& s = p.sub->sources();
    const Cut& c = p.cuts[0];
    EXPECT_EQ(c.index, 1u);
    std::set<Vertex> inside;
    for (Vertex v = 0; v < c.inside.size(); ++v)
        if (c.contains(v)) inside.insert(v);
    EXPECT_EQ(inside, (std::set<Vertex>{s[1], s[2], s[3], s[4]}));
}

TEST(Cuts, CycleCutsAreHalfArcs)
{
    for (std::size_t k : {3, 5, 8}) {
        Prepared p(gen_cycle(k));
        const auto& s = p.sub->sources();
        const std::size_t n2 = s.size();
        for (const Cut& c : p.cuts) {
            std::set<Vertex> want;
            for (std::size_t t = 1; t <= k; ++t) want.insert(s[(c.index + t - 1) % n2]);
            std::set<Vertex> got;
            for (Vertex v = 0; v < c.inside.size(); ++v)
                if (c.contains(v)) got.insert(v);
            EXPECT_EQ(got, want) << "k=" << k << " i=" << c.index;
        }
    }
}

TEST(Cuts, BothSidesConnected)
{
    for (const auto& c : corpus::small()) {
        Prepared p(c.spec);
        const PlanarGraph& g = p.sub->graph();
        oracle::Adj adj(g.vertex_count());
        for (Vertex v = 0; v < g.vertex_count(); ++v)
            for (Dart d : g.rotation(v)) adj[v].push_back(g.head(d));
        for (const Cut& cut : p.cuts)
            for (int side : {0, 1}) {
                oracle::Adj restricted(adj.size());
                Vertex start = npos32;
                std::size_t size = 0;
                for (Vertex v = 0; v < adj.size(); ++v) {
                    if (cut.inside[v] != side) continue;
                    ++size;
                    start = v;
                    for (Vertex w : adj[v])
                        if (cut.inside[w] == side) restricted[v].push_back(w);
                }
                ASSERT_NE(start, npos32) << c.name;
                const auto d = oracle::bfs(restricted, start);
                std::size_t reached = 0;
                for (Vertex v = 0; v < adj.size(); ++v) reached += d[v] >= 0;
                EXPECT_EQ(reached, size) << c.name << " cut " << cut.index << " side " << side;
            }
    }
}

TEST(Cuts, DisconnectedSideIsReported)
{
    Prepared p(gen_grid(3, 3));
    PatternMatrix broken = p.bp.patterns;
    // Put one far-away vertex alone on the A side of cut 1.
    const Vertex far = 8;
    broken.set(far, 0, -broken.get(far, 0));
    try {
        compute_cuts(*p.sub, broken);
        FAIL() << "expected DisconnectedCutSide";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DisconnectedCutSide);
    }
}

TEST(Bisectors, SimpleDualCyclesThroughInfiniteFaceOnce)
{
    for (const auto& c : corpus::small()) {
        Prepared p(c.spec);
        const PlanarGraph& g = p.sub->graph();
        const Face inf = g.infinite_face();
        const auto& s = p.sub->sources();
        for (const Bisector& b : p.bs) {
            ASSERT_GE(b.size(), 2u);
            EXPECT_EQ(b.darts.front(), *g.find_dart(s[b.index], s[b.index - 1]));
            EXPECT_EQ(b.faces[1], inf);
            std::set<Face> faces(b.faces.begin(), b.faces.end());
            EXPECT_EQ(faces.size(), b.size()) << c.name << " bisector " << b.index << " repeats a face";
            std::size_t at_inf = 0;
            for (std::size_t l = 0; l < b.size(); ++l) {
                const Dart d = b.darts[l], next = b.darts[(l + 1) % b.size()];
                EXPECT_EQ(g.right_face(d), b.faces[l]);
                EXPECT_EQ(g.left_face(d), g.right_face(next));
                at_inf += (g.right_face(d) == inf) + (g.left_face(d) == inf);
            }
            EXPECT_EQ(at_inf, 2u) << c.name << " bisector " << b.index;
        }
    }
}

TEST(Bisectors, DartsAreExactlyTheCutBoundary)
{
    for (const auto& c : corpus::small()) {
        Prepared p(c.spec);
        const PlanarGraph& g = p.sub->graph();
        for (std::size_t i = 0; i < p.bs.size(); ++i) {
            std::set<Dart> want;
            for (Dart d = 0; d < g.dart_count(); ++d)
                if (p.bp.patterns.get(g.tail(d), i) < 0 && p.bp.patterns.get(g.head(d), i) > 0) want.insert(d);
            EXPECT_EQ(std::set<Dart>(p.bs[i].darts.begin(), p.bs[i].darts.end()), want) << c.name;
        }
    }
}

TEST(Bisectors, PairwiseArcDisjoint)
{
    for (const auto& c : corpus::small()) {
        Prepared p(c.spec);
        std::map<Dart, std::size_t> owner;
        for (const Bisector& b : p.bs)
            for (Dart d : b.darts) {
                auto [it, fresh] = owner.emplace(d, b.index);
                EXPECT_TRUE(fresh) << c.name << ": dart " << d << " in bisectors " << it->second << " and " << b.index;
            }
        for (const auto& rep : enumerate_all_crossings(p.sub->graph(), p.bs, p.cuts)) EXPECT_EQ(rep.shared_arcs, 0u);
    }
}

TEST(Bisectors, CycleBisectorsCrossAntipodalEdges)
{
    for (std::size_t k : {4, 7}) {
        Prepared p(gen_cycle(k));
        const std::size_t n2 = 2 * k;
        for (const Bisector& b : p.bs) {
            ASSERT_EQ(b.size(), 2u);
            std::set<std::size_t> got;
            for (Dart d : b.darts) got.insert(face_edge_position(*p.sub, edge_of(d)));
            const std::size_t a = b.index, opposite = (b.index + k - 1) % n2 + 1;
            EXPECT_EQ(got, (std::set<std::size_t>{a, opposite}));
        }
    }
}

TEST(Bisectors, NotASimpleCycleOnBrokenCut)
{
    Prepared p(gen_grid(3, 3));
    Cut bad = p.cuts[0];
    for (auto& x : bad.inside) x = 0;
    bad.inside[p.sub->sources()[1]] = 1;
    bad.inside[p.sub->sources()[5]] = 1; // two separate islands
    try {
        extract_bisector(*p.sub, bad);
        FAIL() << "expected NotASimpleCycle";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotASimpleCycle);
    }
}

TEST(Sides, ClassifiesDarts)
{
    Prepared p(gen_cycle(4));
    const PlanarGraph& g = p.sub->graph();
    const Cut& c = p.cuts[0];
    for (Dart d = 0; d < g.dart_count(); ++d) {
        const bool a = c.contains(g.tail(d)), b = c.contains(g.head(d));
        const Side want = a && b ? Side::Left : (!a && !b ? Side::Right : Side::OnCurve);
        EXPECT_EQ(side_of(g, c, d), want);
    }
}

TEST(Crossings, SubdividedCycleOracle)
{
    // On a subdivided k-cycle bisector i is the chord between face edges i and
    // i + k. Distinct chords are diameters and cross once away from f_inf;
    // the k - 1 pairs (i, i + k) share a chord and do not cross at all.
    for (std::size_t k : {4, 5, 8}) {
        Prepared p(gen_cycle(k));
        const auto reps = enumerate_all_crossings(p.sub->graph(), p.bs, p.cuts);
        const std::size_t L = 2 * k - 1;
        ASSERT_EQ(reps.size(), L * (L - 1) / 2);
        for (const auto& rep : reps) {
            const bool same_chord = rep.j == rep.i + k;
            EXPECT_EQ(rep.r, same_chord ? 0u : 1u) << "k=" << k << " pair " << rep.i << "," << rep.j;
        }
        const CrossingTotals tot = crossing_totals(reps);
        EXPECT_EQ(tot.t, L * (L - 1) / 2 - (k - 1));
        if (k == 4) {
            EXPECT_EQ(tot.t, 18u);
        }
        EXPECT_EQ(tot.max_r, 1u);
    }
}

TEST(Crossings, ReversedOrderAndEvenParity)
{
    for (const auto& c : corpus::small()) {
        Prepared p(c.spec);
        const std::size_t k = p.inst.k();
        const auto reps = enumerate_all_crossings(p.sub->graph(), p.bs, p.cuts);
        for (const auto& rep : reps) {
            EXPECT_TRUE(verify_crossing_order(rep)) << c.name << " pair " << rep.i << "," << rep.j;
            EXPECT_EQ(rep.total_crossings % 2, 0u) << c.name << " pair " << rep.i << "," << rep.j;
            EXPECT_EQ(rep.ambiguous_sides, 0u);
            EXPECT_LE(double(rep.r), double(k) / 2 + 2) << c.name;
        }
        const CrossingTotals tot = crossing_totals(reps);
        const std::size_t x = distinct_patterns(p.bp.patterns).count;
        EXPECT_LE(x, 2 * tot.t + 2 * k) << c.name;
        std::size_t hist = 0;
        for (auto [r, cnt] : tot.histogram) hist += r * cnt;
        EXPECT_EQ(hist, tot.t);
    }
}

TEST(Crossings, ShuffledOrderIsRejected)
{
    CrossingReport rep;
    rep.order_i = {0, 1, 2};
    rep.order_j = {2, 1, 0};
    EXPECT_TRUE(verify_crossing_order(rep));
    rep.order_j = {1, 2, 0};
    EXPECT_FALSE(verify_crossing_order(rep));
    rep.order_j = {2, 1};
    EXPECT_FALSE(verify_crossing_order(rep));

    // A real report with several crossings, then tampered with.
    std::size_t tampered = 0;
    for (std::uint64_t seed = 1; seed <= 5 && tampered == 0; ++seed) {
        Prepared p(gen_random_planar(seed, 10, 10, 0.4));
        for (const auto& real : enumerate_all_crossings(p.sub->graph(), p.bs, p.cuts)) {
            if (real.order_j.size() < 2) continue;
            CrossingReport t = real;
            std::reverse(t.order_j.begin(), t.order_j.end());
            EXPECT_TRUE(verify_crossing_order(real));
            EXPECT_FALSE(verify_crossing_order(t));
            ++tampered;
        }
    }
    EXPECT_GT(tampered, 0u);
}

TEST(Crossings, EnumeratorRefusesSelfComparison)
{
    Prepared p(gen_cycle(4));
    CrossingEnumerator e(p.sub->graph());
    EXPECT_THROW(e.enumerate(p.bs[0], p.cuts[0]), Error);
    e.prepare(p.bs[0]);
    EXPECT_THROW(e.enumerate(p.bs[0], p.cuts[0]), Error);
}

TEST(EdgeLabels, BisectorsAgreeWithPatternDifferences)
{
    for (const auto& c : corpus::small()) {
        Prepared p(c.spec);
        const PlanarGraph& g = p.sub->graph();
        const auto from_b = edge_labels_from_bisectors(g, p.bs);
        const auto from_p = edge_labels_from_patterns(g, p.bp.patterns);
        ASSERT_EQ(from_b, from_p) << c.name;
        for (const auto& l : from_p) EXPECT_LE(l.size(), 2u);
    }
}
