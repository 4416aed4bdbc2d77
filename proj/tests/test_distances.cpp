#include <set>

#include <gtest/gtest.h>

#include "corpus.hpp"
#include "oracles.hpp"
#include "osmc/distances.hpp"

using namespace osmc;

namespace {

InstanceSpec square() { return {4, {{1, 3}, {2, 0}, {3, 1}, {0, 2}}, {0, 1, 2, 3}, {}}; }

Pattern binary(std::vector<int> e)
{
    Pattern p{PatternMode::Binary, {}};
    for (int x : e) p.entries.push_back(std::int8_t(x));
    return p;
}

Pattern ternary(std::vector<int> e)
{
    Pattern p = binary(std::move(e));
    p.mode = PatternMode::Ternary;
    return p;
}

} // namespace

TEST(Bfs, SquareFromFirstSource)
{
    const OSInstance inst = make_instance(square());
    EXPECT_EQ(bfs(inst.graph(), 0), (std::vector<std::uint32_t>{0, 1, 2, 1}));
}

TEST(Bfs, AllSourceFieldMatchesOracleAndIsThreadIndependent)
{
    for (const auto& c : corpus::small()) {
        const OSInstance inst = make_instance(c.spec);
        const DistanceField one = all_source_bfs(inst, false, 1);
        const DistanceField four = all_source_bfs(inst, false, 4);
        const auto adj = oracle::adjacency(c.spec);
        for (std::size_t i = 0; i < inst.k(); ++i) {
            const auto want = oracle::bfs(adj, inst.sources()[i]);
            for (Vertex v = 0; v < c.spec.n; ++v) {
                ASSERT_EQ((int)one.at(i, v), want[v]) << c.name;
                ASSERT_EQ(four.at(i, v), one.at(i, v)) << c.name;
            }
        }
    }
}

TEST(Patterns, SquareTernaryPattern)
{
    const OSInstance inst = make_instance(square());
    const PatternMatrix m = compute_patterns(all_source_bfs(inst), PatternMode::Ternary);
    EXPECT_EQ(m.pattern(0), ternary({1, 1, -1}));
    EXPECT_EQ(m.pattern(2), ternary({-1, -1, 1}));
}

TEST(Patterns, ModeMismatch)
{
    const OSInstance inst = make_instance(square());
    EXPECT_THROW(compute_patterns(all_source_bfs(inst), PatternMode::Binary), Error);
    const SubdividedInstance sub = subdivide(inst);
    EXPECT_THROW(compute_patterns(all_source_bfs(sub), PatternMode::Ternary), Error);
    try {
        compute_patterns(all_source_bfs(inst), PatternMode::Binary);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ModeMismatch);
    }
    EXPECT_THROW(ternary_from_binary(ternary({1, 0})), Error);
}

TEST(Patterns, MatrixPackingRoundTrip)
{
    auto value = [](PatternMode mode, std::size_t r, std::size_t j) {
        const int v = int((r * 7 + j * 13) % 3) - 1;
        return (mode == PatternMode::Binary && v == 0) ? 1 : v;
    };
    for (PatternMode mode : {PatternMode::Binary, PatternMode::Ternary}) {
        PatternMatrix m(3, 130, mode);
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t j = 0; j < 130; ++j) m.set(r, j, value(mode, r, j));
        m.set(1, 64, value(mode, 1, 64) > 0 ? -1 : 1); // overwrite, then restore
        m.set(1, 64, value(mode, 1, 64));
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t j = 0; j < 130; ++j) ASSERT_EQ(m.get(r, j), value(mode, r, j));
    }
}

TEST(Patterns, HammingCountsDifferingEntries)
{
    PatternMatrix m(2, 70, PatternMode::Binary);
    for (std::size_t j = 0; j < 70; ++j) m.set(0, j, 1), m.set(1, j, 1);
    m.set(1, 3, -1);
    m.set(1, 69, -1);
    EXPECT_EQ(m.hamming(0, 1), 2u);
    EXPECT_FALSE(m.rows_equal(0, 1));
}

TEST(Patterns, BinaryPatternsMatchSubdividedOracle)
{
    for (const auto& c : corpus::small()) {
        const OSInstance inst = make_instance(c.spec);
        const SubdividedInstance sub = subdivide(inst);
        const BinaryPatterns bp = compute_binary_patterns(sub, 2);
        ASSERT_EQ(bp.patterns.length(), 2 * inst.k() - 1);
        const auto adj = oracle::adjacency(c.spec);
        oracle::SubdividedDistances sd(adj);
        for (Vertex v = 0; v < c.spec.n; ++v) {
            const auto want = oracle::binary_pattern(sd, inst.sources(), v);
            for (std::size_t j = 0; j < want.size(); ++j) ASSERT_EQ(bp.patterns.get(v, j), want[j]) << c.name << " v" << v;
            ASSERT_EQ((int)bp.dist_to_first[v], sd.to_vertex(v, inst.sources()[0])) << c.name;
        }
    }
}

TEST(Patterns, BinaryAgreesWithFullSubdividedField)
{
    const OSInstance inst = make_instance(gen_grid(5, 4));
    const SubdividedInstance sub = subdivide(inst);
    const PatternMatrix full = compute_patterns(all_source_bfs(sub), PatternMode::Binary);
    const BinaryPatterns bp = compute_binary_patterns(sub);
    for (Vertex v = 0; v < sub.graph().vertex_count(); ++v) EXPECT_TRUE(std::equal(full.row(v).begin(), full.row(v).end(), bp.patterns.row(v).begin()));
}

TEST(Patterns, TernaryFromBinaryMatchesOracle)
{
    for (const auto& c : corpus::small()) {
        const OSInstance inst = make_instance(c.spec);
        const BinaryPatterns bp = compute_binary_patterns(subdivide(inst));
        const auto adj = oracle::adjacency(c.spec);
        for (Vertex v = 0; v < c.spec.n; ++v) {
            const Pattern t = ternary_from_binary(bp.patterns.pattern(v));
            const auto want = oracle::ternary_pattern(adj, inst.sources(), v);
            ASSERT_EQ(t.entries.size(), want.size());
            for (std::size_t j = 0; j < want.size(); ++j) ASSERT_EQ(t.entries[j], want[j]) << c.name << " v" << v;
        }
    }
}

TEST(Patterns, BinaryToTernaryWorkedExample)
{
    const Pattern b = binary({1, -1, 1, 1, -1, -1, 1, -1, 1, 1, 1, 1, -1, -1, -1});
    EXPECT_EQ(ternary_from_binary(b), ternary({0, 1, -1, 0, 1, 1, -1}));
    EXPECT_THROW(ternary_from_binary(binary({1, 1})), Error);
}

TEST(Reconstruct, TernaryPrefixSums)
{
    const Pattern p = ternary({1, -1, 0});
    EXPECT_EQ(reconstruct_distance(5, p, 1), 5);
    EXPECT_EQ(reconstruct_distance(5, p, 2), 6);
    EXPECT_EQ(reconstruct_distance(5, p, 3), 5);
    EXPECT_EQ(reconstruct_distance(5, p, 4), 5);
    try {
        reconstruct_distance(5, p, 5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IndexOutOfRange);
    }
    EXPECT_THROW(reconstruct_distance(5, p, 0), Error);
}

TEST(Reconstruct, EveryVertexAndSourceFromBinary)
{
    for (const auto& c : corpus::small()) {
        const OSInstance inst = make_instance(c.spec);
        const BinaryPatterns bp = compute_binary_patterns(subdivide(inst));
        const auto adj = oracle::adjacency(c.spec);
        for (std::size_t i = 1; i <= inst.k(); ++i) {
            const auto d = oracle::bfs(adj, inst.source(i));
            for (Vertex v = 0; v < c.spec.n; ++v) {
                const Pattern p = bp.patterns.pattern(v);
                ASSERT_EQ(reconstruct_distance(bp.dist_to_first[v] / 2, p, i), d[v]) << c.name;
                ASSERT_EQ(reconstruct_distance(bp.dist_to_first[v] / 2, ternary_from_binary(p), i), d[v]) << c.name;
            }
        }
    }
}

TEST(Distinct, SquareGivesEightPatterns)
{
    const OSInstance inst = make_instance(square());
    const BinaryPatterns bp = compute_binary_patterns(subdivide(inst));
    EXPECT_EQ(distinct_patterns(bp.patterns).count, 8u);
}

TEST(Distinct, CountsMatchOracle)
{
    for (const auto& c : corpus::small()) {
        const OSInstance inst = make_instance(c.spec);
        const BinaryPatterns bp = compute_binary_patterns(subdivide(inst));
        const DistinctPatterns d = distinct_patterns(bp.patterns);
        EXPECT_EQ(d.count, oracle::distinct_subdivided_patterns(c.spec)) << c.name;

        std::size_t total = 0;
        for (auto s : d.class_size) total += s;
        EXPECT_EQ(total, bp.patterns.rows());
        for (std::uint32_t r = 0; r < bp.patterns.rows(); ++r) {
            const auto cls = d.class_of[r];
            EXPECT_TRUE(bp.patterns.rows_equal(r, d.representative[cls]));
            EXPECT_LE(d.representative[cls], r);
        }
    }
}

TEST(Distinct, RestrictedToSubset)
{
    PatternMatrix m(4, 3, PatternMode::Binary);
    for (std::size_t j = 0; j < 3; ++j) m.set(0, j, 1), m.set(1, j, 1), m.set(2, j, -1), m.set(3, j, 1);
    const std::vector<Vertex> only{1, 2, 0};
    const DistinctPatterns d = distinct_patterns(m, only);
    EXPECT_EQ(d.count, 2u);
    EXPECT_EQ(d.class_of[3], npos32);
    EXPECT_EQ(d.max_class_size(), 2u);
}

TEST(Forbidden, SyntheticPairIsFound)
{
    PatternMatrix m(3, 6, PatternMode::Binary);
    const int u[] = {-1, 1, 1, -1, 1, 1};
    const int v[] = {1, -1, -1, 1, -1, -1};
    for (std::size_t j = 0; j < 6; ++j) m.set(0, j, 1), m.set(1, j, u[j]), m.set(2, j, v[j]);
    const std::vector<std::uint32_t> rows{0, 1, 2};
    auto w = find_forbidden_configuration(m, rows);
    ASSERT_TRUE(w);
    EXPECT_EQ(w->u, 1u);
    EXPECT_EQ(w->v, 2u);
    EXPECT_EQ((std::vector<std::size_t>(w->index, w->index + 4)), (std::vector<std::size_t>{0, 1, 3, 4}));
    EXPECT_FALSE(forbidden_pair(m, 0, 1));
}

TEST(Forbidden, NeverOccursOnPlanarInstances)
{
    for (const auto& c : corpus::small()) {
        const OSInstance inst = make_instance(c.spec);
        const BinaryPatterns bp = compute_binary_patterns(subdivide(inst));
        const DistinctPatterns d = distinct_patterns(bp.patterns);
        bool exhaustive = false;
        EXPECT_FALSE(find_forbidden_configuration(bp.patterns, d.representative, 50'000'000, &exhaustive)) << c.name;
        EXPECT_TRUE(exhaustive);
    }
}

TEST(Forbidden, SearchIsDirectional)
{
    // The search is directional: u must start with -1 at the first index.
    PatternMatrix m(2, 4, PatternMode::Binary);
    for (std::size_t j = 0; j < 4; ++j) m.set(0, j, j % 2 ? 1 : -1), m.set(1, j, j % 2 ? -1 : 1);
    EXPECT_TRUE(forbidden_pair(m, 0, 1));
    EXPECT_FALSE(forbidden_pair(m, 1, 0));
}
