#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "osmc/error.hpp"
#include "osmc/instance.hpp"

namespace osmc {

/// Which vertices become terminals.
struct TerminalPolicy {
    enum class Kind { All, Boundary, Random, Blob } kind = Kind::All;
    double fraction = 1.0; // Random and Blob

    /// "all", "boundary", "random:F" or "blob:F" with 0 < F <= 1.
    static TerminalPolicy parse(const std::string& s)
    {
        if (s == "all") return {Kind::All, 1.0};
        if (s == "boundary") return {Kind::Boundary, 1.0};
        const auto colon = s.find(':');
        const std::string head = s.substr(0, colon);
        if (colon == std::string::npos || (head != "random" && head != "blob"))
            throw Error(ErrorCode::InvalidInput, "unknown terminal policy '" + s + "'");
        double f = 0;
        try {
            f = std::stod(s.substr(colon + 1));
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidInput, "bad fraction in terminal policy '" + s + "'");
        }
        if (!(f > 0 && f <= 1)) throw Error(ErrorCode::InvalidInput, "terminal fraction must be in (0, 1]");
        return {head == "random" ? Kind::Random : Kind::Blob, f};
    }

    std::string to_string() const
    {
        switch (kind) {
        case Kind::All: return "all";
        case Kind::Boundary: return "boundary";
        case Kind::Random: return "random:" + std::to_string(fraction);
        case Kind::Blob: return "blob:" + std::to_string(fraction);
        }
        return "?";
    }
};

/// Fills spec.terminals according to the policy. Blob grows a BFS ball from a
/// seeded random start, so the terminals induce a connected subgraph.
inline void apply_terminals(InstanceSpec& spec, const TerminalPolicy& policy, std::uint64_t seed)
{
    std::mt19937_64 rng(seed ^ 0x7465726d696e616cull);
    const std::size_t n = spec.n;
    const auto want = std::max<std::size_t>(1, std::size_t(std::llround(policy.fraction * double(n))));
    spec.terminals.clear();
    switch (policy.kind) {
    case TerminalPolicy::Kind::All:
        for (Vertex v = 0; v < n; ++v) spec.terminals.push_back(v);
        break;
    case TerminalPolicy::Kind::Boundary:
        spec.terminals = spec.outer_face;
        break;
    case TerminalPolicy::Kind::Random: {
        std::vector<Vertex> all(n);
        for (Vertex v = 0; v < n; ++v) all[v] = v;
        std::shuffle(all.begin(), all.end(), rng);
        spec.terminals.assign(all.begin(), all.begin() + std::ptrdiff_t(std::min(want, n)));
        break;
    }
    case TerminalPolicy::Kind::Blob: {
        const Vertex start = Vertex(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
        std::vector<char> seen(n, 0);
        std::vector<Vertex> queue{start};
        seen[start] = 1;
        for (std::size_t h = 0; h < queue.size() && queue.size() < want; ++h)
            for (Vertex w : spec.rotations[queue[h]])
                if (!seen[w] && queue.size() < want) seen[w] = 1, queue.push_back(w);
        spec.terminals = std::move(queue);
        break;
    }
    }
    std::sort(spec.terminals.begin(), spec.terminals.end());
}

/// Cycle C_k with S = all of it.
inline InstanceSpec gen_cycle(std::size_t k)
{
    if (k < 3) throw Error(ErrorCode::KTooSmall, "cycle needs k >= 3");
    InstanceSpec s;
    s.n = k;
    s.rotations.resize(k);
    for (Vertex v = 0; v < k; ++v) {
        s.rotations[v] = {Vertex((v + k - 1) % k), Vertex((v + 1) % k)};
        s.outer_face.push_back(v);
    }
    return s;
}

/// w x h grid, vertex (x, y) has id y * w + x, rotations counterclockwise
/// (right, up, left, down). S runs counterclockwise from (0, 0) along the bottom.
inline InstanceSpec gen_grid(std::size_t w, std::size_t h)
{
    if (w < 2 || h < 2) throw Error(ErrorCode::InvalidInput, "grid needs w, h >= 2");
    InstanceSpec s;
    s.n = w * h;
    s.rotations.resize(s.n);
    auto id = [w](std::size_t x, std::size_t y) { return Vertex(y * w + x); };
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) {
            auto& r = s.rotations[id(x, y)];
            if (x + 1 < w) r.push_back(id(x + 1, y));
            if (y + 1 < h) r.push_back(id(x, y + 1));
            if (x > 0) r.push_back(id(x - 1, y));
            if (y > 0) r.push_back(id(x, y - 1));
        }
    for (std::size_t x = 0; x + 1 < w; ++x) s.outer_face.push_back(id(x, 0));
    for (std::size_t y = 0; y + 1 < h; ++y) s.outer_face.push_back(id(w - 1, y));
    for (std::size_t x = w - 1; x > 0; --x) s.outer_face.push_back(id(x, h - 1));
    for (std::size_t y = h - 1; y > 0; --y) s.outer_face.push_back(id(0, y));
    return s;
}

/// Grid with interior edges deleted at `rate`. Boundary-cycle edges are kept and
/// deletions that would disconnect the graph are skipped.
inline InstanceSpec gen_random_planar(std::uint64_t seed, std::size_t w, std::size_t h, double rate)
{
    if (!(rate >= 0 && rate < 1)) throw Error(ErrorCode::InvalidInput, "deletion rate must be in [0, 1)");
    InstanceSpec s = gen_grid(w, h);
    std::vector<std::pair<Vertex, Vertex>> boundary;
    for (std::size_t i = 0; i < s.outer_face.size(); ++i) {
        Vertex a = s.outer_face[i], b = s.outer_face[(i + 1) % s.outer_face.size()];
        boundary.push_back({std::min(a, b), std::max(a, b)});
    }
    std::sort(boundary.begin(), boundary.end());
    std::vector<std::pair<Vertex, Vertex>> interior;
    for (Vertex u = 0; u < s.n; ++u)
        for (Vertex v : s.rotations[u])
            if (u < v && !std::binary_search(boundary.begin(), boundary.end(), std::pair{u, v})) interior.push_back({u, v});

    std::mt19937_64 rng(seed);
    std::shuffle(interior.begin(), interior.end(), rng);
    std::bernoulli_distribution coin(rate);
    auto erase = [&](Vertex a, Vertex b) {
        auto& r = s.rotations[a];
        r.erase(std::find(r.begin(), r.end(), b));
    };
    // removing {u, v} disconnects the graph iff v is unreachable from u without it
    auto bridge = [&](Vertex u, Vertex v) {
        std::vector<char> seen(s.n, 0);
        std::vector<Vertex> stack{u};
        seen[u] = 1;
        while (!stack.empty()) {
            const Vertex a = stack.back();
            stack.pop_back();
            for (Vertex b : s.rotations[a]) {
                if ((a == u && b == v) || seen[b]) continue;
                if (b == v) return false;
                seen[b] = 1;
                stack.push_back(b);
            }
        }
        return true;
    };
    for (auto [u, v] : interior) {
        if (!coin(rng) || bridge(u, v)) continue;
        erase(u, v);
        erase(v, u);
    }
    return s;
}

namespace detail {

// First candidate that validates; generators build a small set of orientation
// variants and keep the planar one whose S is a face.
inline InstanceSpec first_valid(std::vector<InstanceSpec> candidates, const char* family)
{
    for (auto& c : candidates)
        if (validate_instance(c).ok()) return std::move(c);
    throw Error(ErrorCode::InvalidInput, std::string("no valid embedding for ") + family);
}

} // namespace detail

/// Random Halin graph: a plane tree whose internal vertices all have degree
/// >= 3, plus the cycle through its leaves in embedding order. S = that cycle.
inline InstanceSpec gen_halin(std::uint64_t seed, std::size_t leaves)
{
    if (leaves < 3) throw Error(ErrorCode::InvalidInput, "halin needs at least 3 leaves");
    std::mt19937_64 rng(seed);
    std::vector<std::vector<Vertex>> children{{1, 2, 3}, {}, {}, {}};
    std::vector<Vertex> parent{npos32, 0, 0, 0};
    std::vector<Vertex> leaf_list{1, 2, 3};
    while (leaf_list.size() < leaves) {
        const bool split = std::bernoulli_distribution(0.5)(rng);
        if (split) {
            // a leaf gains two children: net +1 leaf
            const std::size_t at = std::uniform_int_distribution<std::size_t>(0, leaf_list.size() - 1)(rng);
            const Vertex v = leaf_list[at];
            const Vertex a = Vertex(children.size()), b = a + 1;
            children.resize(children.size() + 2);
            parent.push_back(v);
            parent.push_back(v);
            children[v] = {a, b};
            leaf_list[at] = a;
            leaf_list.push_back(b);
        } else {
            // an internal vertex gains one more child at a random slot
            std::vector<Vertex> internal;
            for (Vertex v = 0; v < children.size(); ++v)
                if (!children[v].empty()) internal.push_back(v);
            const Vertex v = internal[std::uniform_int_distribution<std::size_t>(0, internal.size() - 1)(rng)];
            const Vertex c = Vertex(children.size());
            children.emplace_back();
            parent.push_back(v);
            const std::size_t slot = std::uniform_int_distribution<std::size_t>(0, children[v].size())(rng);
            children[v].insert(children[v].begin() + std::ptrdiff_t(slot), c);
            leaf_list.push_back(c);
        }
    }
    const std::size_t n = children.size();
    // leaves in embedding order: depth-first, children left to right
    std::vector<Vertex> order;
    std::vector<Vertex> stack{0};
    while (!stack.empty()) {
        const Vertex v = stack.back();
        stack.pop_back();
        if (children[v].empty()) order.push_back(v);
        for (auto it = children[v].rbegin(); it != children[v].rend(); ++it) stack.push_back(*it);
    }
    const std::size_t L = order.size();
    std::vector<std::size_t> pos(n, 0);
    for (std::size_t i = 0; i < L; ++i) pos[order[i]] = i;

    std::vector<InstanceSpec> candidates;
    for (int variant = 0; variant < 4; ++variant) {
        const bool reverse_children = variant & 1, swap_leaf = variant & 2;
        InstanceSpec s;
        s.n = n;
        s.rotations.resize(n);
        for (Vertex v = 0; v < n; ++v) {
            auto& r = s.rotations[v];
            if (v != 0) r.push_back(parent[v]);
            std::vector<Vertex> ch = children[v];
            if (reverse_children) std::reverse(ch.begin(), ch.end());
            r.insert(r.end(), ch.begin(), ch.end());
            if (ch.empty()) {
                const Vertex prev = order[(pos[v] + L - 1) % L], next = order[(pos[v] + 1) % L];
                r.push_back(swap_leaf ? next : prev);
                r.push_back(swap_leaf ? prev : next);
            }
        }
        s.outer_face = order;
        candidates.push_back(std::move(s));
    }
    return detail::first_valid(std::move(candidates), "halin");
}

/// Ids of the lower-bound S-Halin family.
struct ShalinLayout {
    std::size_t k_half = 0;

    Vertex root() const noexcept { return 0; }
    /// v_{i,j}, 1 <= j <= i <= k'.
    Vertex v(std::size_t i, std::size_t j) const noexcept { return Vertex(1 + (i - 1) * i / 2 + (j - 1)); }
    /// q_t, 1 <= t <= k'.
    Vertex q(std::size_t t) const noexcept { return Vertex(1 + k_half * (k_half + 1) / 2 + (t - 1)); }
    std::size_t vertex_count() const noexcept { return 1 + k_half * (k_half + 1) / 2 + k_half; }
};

/// Paths P_1..P_{k'} from a common root, P_i = v_{0,0} v_{i,1} ... v_{i,i}, closed
/// by the cycle v_{1,1} v_{2,2} ... v_{k',k'} q_1 ... q_{k'}. S is that cycle
/// starting at v_{1,1}.
inline InstanceSpec gen_shalin_lower(std::size_t k)
{
    if (k % 2) throw Error(ErrorCode::OddK, "shalin_lower needs even k, got " + std::to_string(k));
    if (k < 4) throw Error(ErrorCode::KTooSmall, "shalin_lower needs k >= 4");
    const ShalinLayout ids{k / 2};
    const std::size_t kh = ids.k_half;

    std::vector<Vertex> cycle;
    for (std::size_t i = 1; i <= kh; ++i) cycle.push_back(ids.v(i, i));
    for (std::size_t t = 1; t <= kh; ++t) cycle.push_back(ids.q(t));
    const std::size_t c = cycle.size();
    std::vector<std::size_t> cpos(ids.vertex_count(), npos32);
    for (std::size_t i = 0; i < c; ++i) cpos[cycle[i]] = i;

    std::vector<InstanceSpec> candidates;
    for (int variant = 0; variant < 4; ++variant) {
        const bool reverse_root = variant & 1, swap_end = variant & 2;
        InstanceSpec s;
        s.n = ids.vertex_count();
        s.rotations.resize(s.n);
        for (std::size_t i = 1; i <= kh; ++i) s.rotations[0].push_back(ids.v(i, 1));
        if (reverse_root) std::reverse(s.rotations[0].begin(), s.rotations[0].end());
        for (std::size_t i = 1; i <= kh; ++i)
            for (std::size_t j = 1; j <= i; ++j) {
                auto& r = s.rotations[ids.v(i, j)];
                r.push_back(j == 1 ? ids.root() : ids.v(i, j - 1));
                if (j < i) r.push_back(ids.v(i, j + 1));
            }
        for (Vertex u : cycle) {
            const Vertex prev = cycle[(cpos[u] + c - 1) % c], next = cycle[(cpos[u] + 1) % c];
            auto& r = s.rotations[u];
            r.push_back(swap_end ? next : prev);
            r.push_back(swap_end ? prev : next);
        }
        s.outer_face = cycle;
        candidates.push_back(std::move(s));
    }
    return detail::first_valid(std::move(candidates), "shalin_lower");
}

/// Family name plus parameters, enough to regenerate an instance.
struct GeneratorSpec {
    std::string family = "grid"; // cycle | grid | random-planar | halin | shalin-lower
    std::size_t w = 3, h = 3;
    std::size_t k = 8;      // cycle length or shalin k
    std::size_t leaves = 8; // halin
    double rate = 0.3;      // random-planar
    std::uint64_t seed = 1;
    TerminalPolicy terminals;
};

inline InstanceSpec generate(const GeneratorSpec& g)
{
    std::string fam = g.family;
    std::replace(fam.begin(), fam.end(), '_', '-');
    InstanceSpec s;
    if (fam == "cycle") s = gen_cycle(g.k);
    else if (fam == "grid") s = gen_grid(g.w, g.h);
    else if (fam == "random-planar") s = gen_random_planar(g.seed, g.w, g.h, g.rate);
    else if (fam == "halin") s = gen_halin(g.seed, g.leaves);
    else if (fam == "shalin-lower") s = gen_shalin_lower(g.k);
    else throw Error(ErrorCode::InvalidInput, "unknown family '" + g.family + "'");
    apply_terminals(s, g.terminals, g.seed);
    return s;
}

} // namespace osmc
