#include <functional>
#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "osmc/distances.hpp"
#include "osmc/generators.hpp"
#include "osmc/osg_io.hpp"

using namespace osmc;

namespace {

std::size_t edge_count(const InstanceSpec& s)
{
    std::size_t deg = 0;
    for (const auto& r : s.rotations) deg += r.size();
    return deg / 2;
}

bool induced_connected(const InstanceSpec& s, const std::vector<Vertex>& members)
{
    if (members.empty()) return true;
    std::set<Vertex> in(members.begin(), members.end());
    oracle::Adj adj(s.n);
    for (Vertex v : members)
        for (Vertex w : s.rotations[v])
            if (in.count(w)) adj[v].push_back(w);
    const auto d = oracle::bfs(adj, members.front());
    for (Vertex v : members)
        if (d[v] < 0) return false;
    return true;
}

ErrorCode code_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::InvalidInput;
}

} // namespace

TEST(Cycle, Counts)
{
    const auto s = gen_cycle(7);
    EXPECT_EQ(s.n, 7u);
    EXPECT_EQ(edge_count(s), 7u);
    EXPECT_EQ(s.outer_face.size(), 7u);
    EXPECT_TRUE(validate_instance(s).ok());
    EXPECT_EQ(code_of([] { gen_cycle(2); }), ErrorCode::KTooSmall);
}

TEST(Grid, CountsAndBoundary)
{
    for (auto [w, h] : {std::pair<std::size_t, std::size_t>{2, 2}, {3, 5}, {10, 10}, {40, 40}}) {
        const auto s = gen_grid(w, h);
        EXPECT_EQ(s.n, w * h);
        EXPECT_EQ(edge_count(s), w * (h - 1) + h * (w - 1));
        EXPECT_EQ(s.outer_face.size(), 2 * (w + h) - 4);
        const auto r = validate_instance(s);
        EXPECT_TRUE(r.ok());
        EXPECT_FALSE(r.mirrored);
    }
    EXPECT_EQ(code_of([] { gen_grid(1, 5); }), ErrorCode::InvalidInput);
}

TEST(RandomPlanar, HundredSamplesValidate)
{
    const auto grid = gen_grid(8, 6);
    std::set<std::size_t> sizes;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto s = gen_random_planar(seed, 8, 6, 0.3);
        ASSERT_TRUE(validate_instance(s).ok()) << "seed " << seed;
        EXPECT_EQ(s.outer_face, grid.outer_face);
        EXPECT_LE(edge_count(s), edge_count(grid));
        sizes.insert(edge_count(s));
        const auto d = oracle::bfs(oracle::adjacency(s), 0);
        for (int x : d) ASSERT_GE(x, 0);
    }
    EXPECT_GT(sizes.size(), 1u);
}

TEST(RandomPlanar, HighRateStaysConnected)
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto s = gen_random_planar(seed, 7, 7, 0.95);
        EXPECT_TRUE(validate_instance(s).ok());
    }
    EXPECT_EQ(code_of([] { gen_random_planar(1, 4, 4, 1.0); }), ErrorCode::InvalidInput);
}

TEST(RandomPlanar, DeterministicInSeed)
{
    EXPECT_EQ(gen_random_planar(42, 9, 7, 0.4), gen_random_planar(42, 9, 7, 0.4));
    EXPECT_NE(gen_random_planar(42, 9, 7, 0.4), gen_random_planar(43, 9, 7, 0.4));
}

TEST(Halin, StructureAndValidity)
{
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        for (std::size_t leaves : {3, 5, 12, 40}) {
            const auto s = gen_halin(seed, leaves);
            ASSERT_TRUE(validate_instance(s).ok()) << "seed " << seed << " leaves " << leaves;
            EXPECT_EQ(s.outer_face.size(), leaves);
            EXPECT_EQ(edge_count(s), (s.n - 1) + leaves); // tree plus leaf cycle
            for (Vertex v = 0; v < s.n; ++v) EXPECT_GE(s.rotations[v].size(), 3u) << "vertex " << v;
        }
    }
    EXPECT_EQ(gen_halin(5, 20), gen_halin(5, 20));
    EXPECT_EQ(code_of([] { gen_halin(1, 2); }), ErrorCode::InvalidInput);
}

TEST(Shalin, LayoutAndFace)
{
    const std::size_t k = 8, kh = 4;
    const auto s = gen_shalin_lower(k);
    const ShalinLayout ids{kh};
    ASSERT_TRUE(validate_instance(s).ok());
    EXPECT_EQ(s.n, 1 + kh * (kh + 1) / 2 + kh);
    EXPECT_EQ(s.outer_face.size(), k);
    EXPECT_EQ(s.outer_face.front(), ids.v(1, 1));
    for (std::size_t i = 1; i <= kh; ++i) EXPECT_EQ(s.outer_face[i - 1], ids.v(i, i));
    for (std::size_t t = 1; t <= kh; ++t) EXPECT_EQ(s.outer_face[kh + t - 1], ids.q(t));

    // P_i has length i: d(root, v_{i,i}) = i.
    const auto d = oracle::bfs(oracle::adjacency(s), ids.root());
    for (std::size_t i = 1; i <= kh; ++i)
        for (std::size_t j = 1; j <= i; ++j) EXPECT_EQ(d[ids.v(i, j)], int(j));

    EXPECT_EQ(code_of([] { gen_shalin_lower(9); }), ErrorCode::OddK);
    EXPECT_EQ(code_of([] { gen_shalin_lower(2); }), ErrorCode::KTooSmall);
}

TEST(Shalin, WorkedPatternForK8)
{
    const auto s = gen_shalin_lower(8);
    const ShalinLayout ids{4};
    EXPECT_EQ(oracle::ternary_pattern(oracle::adjacency(s), s.outer_face, ids.v(3, 1)),
              (std::vector<int>{1, -1, 1, 1, 1, -1, -1}));
}

TEST(Shalin, ClosedFormPatternsAndDistances)
{
    for (std::size_t k : {8, 10, 16, 24}) {
        const std::size_t kh = k / 2;
        const auto s = gen_shalin_lower(k);
        const ShalinLayout ids{kh};
        const auto adj = oracle::adjacency(s);
        std::set<std::vector<int>> seen;
        for (std::size_t i = 1; i <= kh; ++i)
            for (std::size_t j = 1; j < i; ++j) {
                std::vector<int> want;
                want.insert(want.end(), i - j - 1, 1);
                want.insert(want.end(), j, -1);
                want.insert(want.end(), kh + j + 1 - i, 1);
                want.insert(want.end(), kh - j - 1, -1);
                const auto got = oracle::ternary_pattern(adj, s.outer_face, ids.v(i, j));
                EXPECT_EQ(got, want) << "k=" << k << " v_" << i << "," << j;
                seen.insert(got);
            }
        EXPECT_EQ(seen.size(), kh * (kh - 1) / 2);

        for (std::size_t t = 1; t <= kh; ++t) {
            const auto d = oracle::bfs(adj, ids.v(t, t));
            for (std::size_t i = 1; i <= kh; ++i)
                for (std::size_t j = 1; j <= i; ++j)
                    if (t <= i - j) {
                        EXPECT_EQ(d[ids.v(i, j)], int(j + t)) << "k=" << k;
                    }
        }
    }
}

TEST(Terminals, PolicyParsing)
{
    EXPECT_EQ(TerminalPolicy::parse("all").kind, TerminalPolicy::Kind::All);
    EXPECT_EQ(TerminalPolicy::parse("boundary").kind, TerminalPolicy::Kind::Boundary);
    const auto r = TerminalPolicy::parse("random:0.25");
    EXPECT_EQ(r.kind, TerminalPolicy::Kind::Random);
    EXPECT_DOUBLE_EQ(r.fraction, 0.25);
    EXPECT_EQ(TerminalPolicy::parse(r.to_string()).fraction, 0.25);
    EXPECT_EQ(TerminalPolicy::parse("blob:1").kind, TerminalPolicy::Kind::Blob);
    for (const char* bad : {"", "some", "random", "random:0", "blob:1.5", "random:x"})
        EXPECT_EQ(code_of([&] { TerminalPolicy::parse(bad); }), ErrorCode::InvalidInput) << bad;
}

TEST(Terminals, PoliciesProduceTheRightSets)
{
    GeneratorSpec g;
    g.family = "grid";
    g.w = 10;
    g.h = 8;
    g.terminals = TerminalPolicy::parse("boundary");
    auto s = generate(g);
    std::vector<Vertex> boundary = s.outer_face;
    std::sort(boundary.begin(), boundary.end());
    EXPECT_EQ(s.terminals, boundary);

    g.terminals = TerminalPolicy::parse("random:0.3");
    s = generate(g);
    EXPECT_EQ(s.terminals.size(), 24u);
    EXPECT_TRUE(std::is_sorted(s.terminals.begin(), s.terminals.end()));
    EXPECT_TRUE(validate_instance(s).ok());

    g.terminals = TerminalPolicy::parse("all");
    EXPECT_EQ(generate(g).terminals.size(), 80u);
}

TEST(Terminals, BlobIsConnected)
{
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        GeneratorSpec g;
        g.family = "random-planar";
        g.w = g.h = 9;
        g.seed = seed;
        g.terminals = TerminalPolicy::parse("blob:0.15");
        const auto s = generate(g);
        EXPECT_EQ(s.terminals.size(), 12u);
        EXPECT_TRUE(induced_connected(s, s.terminals)) << "seed " << seed;
    }
}

TEST(Generate, FamilyNamesAndReproducibility)
{
    for (const char* fam : {"cycle", "grid", "random-planar", "random_planar", "halin", "shalin-lower", "shalin_lower"}) {
        GeneratorSpec g;
        g.family = fam;
        g.seed = 17;
        g.terminals = TerminalPolicy::parse("random:0.5");
        const auto a = generate(g), b = generate(g);
        EXPECT_EQ(to_osg(a), to_osg(b)) << fam;
        EXPECT_TRUE(validate_instance(a).ok()) << fam;
    }
    GeneratorSpec g;
    g.family = "torus";
    EXPECT_EQ(code_of([&] { generate(g); }), ErrorCode::InvalidInput);
}
