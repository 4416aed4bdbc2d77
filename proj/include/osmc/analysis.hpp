#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "osmc/bisectors.hpp"
#include "osmc/distances.hpp"
#include "osmc/encoding.hpp"
#include "osmc/generators.hpp"
#include "osmc/instance.hpp"
#include "osmc/serialize.hpp"
#include "osmc/shattering.hpp"

namespace osmc {

/// Plain BFS ground truth, memoized per source.
class DistanceOracle {
public:
    explicit DistanceOracle(const OSInstance& inst) : inst_(&inst), rows_(inst.k()) {}

    std::uint32_t distance(Vertex v, std::size_t i)
    {
        const Vertex s = inst_->source(i);
        auto& row = rows_[i - 1];
        if (row.empty()) row = bfs(inst_->graph(), s);
        return row.at(v);
    }

private:
    const OSInstance* inst_;
    std::vector<std::vector<std::uint32_t>> rows_;
};

inline std::uint32_t oracle_distance(const OSInstance& inst, Vertex v, std::size_t i)
{
    return bfs(inst.graph(), inst.source(i)).at(v);
}

struct CheckResult {
    CheckResult() = default;
    explicit CheckResult(std::string check_name) : name(std::move(check_name)) {}

    std::string name;
    bool passed = true;
    std::size_t checked = 0;
    std::size_t violations = 0;
    std::string reproducer; // first violation: enough to replay it
    std::string note;

    void fail(std::string what)
    {
        passed = false;
        if (violations++ == 0) reproducer = std::move(what);
    }
};

struct VerificationReport {
    std::string instance_id;
    std::vector<CheckResult> checks;
    std::map<std::string, double> metrics;

    bool ok() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
    }
    const CheckResult* find(const std::string& name) const
    {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

struct VerifyOptions {
    std::string instance_id = "instance";
    double crossing_slack = 2.0;
    std::size_t path_samples = 20;
    std::size_t exhaustive_shatter_k = 16; // d = 4 exhaustive up to this k, sampled above
    std::uint64_t shatter_max_sets = 2'000'000;
    std::size_t queries = 10'000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::size_t shalin_k = 0; // when nonzero, also check the closed-form S-Halin patterns
    bool crossings = true;
};

/// Pattern of v_{i,j} in the lower-bound S-Halin family over S (length k - 1):
/// 1^{i-j-1} (-1)^j 1^{k'+j+1-i} (-1)^{k'-j-1}.
inline std::vector<int> shalin_expected_pattern(std::size_t k, std::size_t i, std::size_t j)
{
    const std::size_t kh = k / 2;
    std::vector<int> p;
    p.insert(p.end(), i - j - 1, 1);
    p.insert(p.end(), j, -1);
    p.insert(p.end(), kh + j + 1 - i, 1);
    p.insert(p.end(), kh - j - 1, -1);
    return p;
}

/// Compares every v_{i,j} (1 <= j < i <= k') of gen_shalin_lower(k) against the
/// closed form and checks the patterns are pairwise distinct.
inline CheckResult check_shalin_patterns(std::size_t k)
{
    CheckResult c{"shalin_closed_form"};
    const OSInstance inst = make_instance(gen_shalin_lower(k));
    const PatternMatrix p = compute_patterns(all_source_bfs(inst), PatternMode::Ternary);
    const ShalinLayout ids{k / 2};
    std::vector<Vertex> members;
    for (std::size_t i = 1; i <= ids.k_half; ++i)
        for (std::size_t j = 1; j < i; ++j) {
            const Vertex v = ids.v(i, j);
            members.push_back(v);
            ++c.checked;
            const auto want = shalin_expected_pattern(k, i, j);
            for (std::size_t e = 0; e < want.size(); ++e)
                if (p.get(v, e) != want[e]) {
                    c.fail("v_{" + std::to_string(i) + "," + std::to_string(j) + "} (vertex " + std::to_string(v) +
                           ") differs at entry " + std::to_string(e + 1));
                    break;
                }
        }
    const std::size_t distinct = distinct_patterns(p, members).count;
    const std::size_t kh = k / 2;
    if (distinct != kh * (kh - 1) / 2)
        c.fail("expected " + std::to_string(kh * (kh - 1) / 2) + " distinct patterns, found " + std::to_string(distinct));
    c.note = std::to_string(distinct) + " distinct among v_{i,j}";
    return c;
}

/// Everything derived from one instance that the analysis suites share.
struct InstanceAnalysis {
    std::size_t n = 0, m = 0, k = 0, terminals = 0, n_sub = 0;
    std::size_t x = 0;
    std::size_t max_class = 0;
    std::optional<CrossingTotals> crossings;
};

inline InstanceAnalysis analyze_instance(const OSInstance& inst, bool crossings, unsigned threads = 1)
{
    const SubdividedInstance sub(inst);
    const BinaryPatterns bp = compute_binary_patterns(sub, threads);
    const DistinctPatterns dp = distinct_patterns(bp.patterns);
    InstanceAnalysis a{inst.graph().vertex_count(), inst.graph().edge_count(), inst.k(), inst.terminals().size(),
                       sub.graph().vertex_count(), dp.count, dp.max_class_size(), std::nullopt};
    if (crossings) {
        const auto cuts = compute_cuts(sub, bp.patterns);
        const auto bs = extract_bisectors(sub, cuts);
        a.crossings = crossing_totals(enumerate_all_crossings(sub.graph(), bs, cuts));
    }
    return a;
}

/// Runs every property suite on one instance.
inline VerificationReport verify(const OSInstance& inst, const VerifyOptions& opt = {})
{
    VerificationReport rep;
    rep.instance_id = opt.instance_id;
    std::mt19937_64 rng(opt.seed);
    const PlanarGraph& g = inst.graph();
    const std::size_t k = inst.k();
    const SubdividedInstance sub(inst);
    const PlanarGraph& g2 = sub.graph();
    auto add = [&](CheckResult c) -> CheckResult& {
        rep.checks.push_back(std::move(c));
        return rep.checks.back();
    };
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };

    rep.metrics["n"] = double(g.vertex_count());
    rep.metrics["m"] = double(g.edge_count());
    rep.metrics["k"] = double(k);
    rep.metrics["terminals"] = double(inst.terminals().size());

    {
        CheckResult c{"distance_doubling"};
        for (int s = 0; s < 10; ++s) {
            const Vertex u = Vertex(pick(g.vertex_count())), v = Vertex(pick(g.vertex_count()));
            const auto d1 = bfs(g, u), d2 = bfs(g2, u);
            ++c.checked;
            if (d2[v] != 2 * d1[v])
                c.fail(opt.instance_id + ": d'(" + std::to_string(u) + "," + std::to_string(v) + ")=" +
                       std::to_string(d2[v]) + " but d=" + std::to_string(d1[v]));
        }
        add(std::move(c));
    }

    BinaryPatterns bp;
    {
        CheckResult c{"binary_entries"};
        c.note = "every subdivided vertex alternates parity between s'_j and w_j";
        try {
            bp = compute_binary_patterns(sub, opt.threads);
            c.checked = g2.vertex_count();
        } catch (const Error& e) {
            c.fail(opt.instance_id + ": " + e.message());
            add(std::move(c));
            return rep;
        }
        add(std::move(c));
    }

    {
        CheckResult c{"source_face_radius"};
        for (std::size_t i = 1; i <= k; ++i) {
            const auto d = bfs(g, inst.source(i));
            for (std::size_t j = 1; j <= k; ++j) {
                ++c.checked;
                if (d[inst.source(j)] > k / 2)
                    c.fail(opt.instance_id + ": d(s_" + std::to_string(i) + ",s_" + std::to_string(j) +
                           ")=" + std::to_string(d[inst.source(j)]));
            }
            if (c.checked > 200'000) {
                c.note = "sampled first sources";
                break;
            }
        }
        add(std::move(c));
    }

    {
        CheckResult c{"reconstruction"};
        DistanceOracle oracle(inst);
        const bool all = g.vertex_count() * k <= 2'000'000;
        auto one = [&](Vertex v, std::size_t i) {
            long long sum = 0;
            for (std::size_t j = 0; j < 2 * (i - 1); ++j) sum += bp.patterns.get(v, j);
            const long long got = bp.dist_to_first[v] / 2 + sum / 2;
            ++c.checked;
            if (got != oracle.distance(v, i))
                c.fail(opt.instance_id + ": vertex " + std::to_string(v) + " source " + std::to_string(i));
        };
        if (all) {
            for (std::size_t i = 1; i <= k; ++i)
                for (Vertex v = 0; v < g.vertex_count(); ++v) one(v, i);
        } else {
            for (std::size_t q = 0; q < opt.queries; ++q) one(Vertex(pick(g.vertex_count())), 1 + pick(k));
            c.note = "sampled";
        }
        add(std::move(c));
    }

    {
        CheckResult c{"adjacent_patterns"};
        for (EdgeId e = 0; e < g2.edge_count(); ++e) {
            ++c.checked;
            if (bp.patterns.hamming(g2.tail(2 * e), g2.head(2 * e)) > 2)
                c.fail(opt.instance_id + ": subdivided edge " + std::to_string(g2.tail(2 * e)) + "-" +
                       std::to_string(g2.head(2 * e)));
        }
        add(std::move(c));
    }

    const DistinctPatterns dp = distinct_patterns(bp.patterns);
    rep.metrics["x"] = double(dp.count);
    rep.metrics["max_pattern_class_size"] = double(dp.max_class_size());

    std::vector<Cut> cuts;
    {
        CheckResult c{"cut_sides_connected"};
        c.checked = bp.patterns.length();
        try {
            cuts = compute_cuts(sub, bp.patterns);
        } catch (const Error& e) {
            c.fail(opt.instance_id + ": " + e.message());
        }
        const bool ok = c.passed;
        add(std::move(c));
        if (!ok) return rep;
    }

    std::vector<Bisector> bs;
    {
        CheckResult c{"bisector_structure"};
        const Face inf = g2.infinite_face();
        const auto& s = sub.sources();
        for (const Cut& cut : cuts) {
            ++c.checked;
            const std::string tag = opt.instance_id + ": bisector " + std::to_string(cut.index);
            Bisector b;
            try {
                b = extract_bisector(sub, cut);
            } catch (const Error& e) {
                c.fail(opt.instance_id + ": " + e.message());
                bs.push_back({cut.index, {}, {}});
                continue;
            }
            std::size_t at_inf = 0;
            for (Dart d : b.darts) {
                at_inf += (g2.right_face(d) == inf) + (g2.left_face(d) == inf);
                if (!cut.contains(g2.tail(d)) || cut.contains(g2.head(d))) c.fail(tag + " has a dart not leaving A_i");
            }
            if (at_inf != 2) c.fail(tag + " has " + std::to_string(at_inf) + " darts at the infinite face");
            if (b.darts.empty() || b.darts.front() != *g2.find_dart(s[cut.index], s[cut.index - 1]))
                c.fail(tag + " does not start at its face edge");

            // flood fill from s'_{i+1} without crossing the bisector must give back A_i
            std::vector<std::uint8_t> blocked(g2.edge_count(), 0);
            for (Dart d : b.darts) blocked[edge_of(d)] = 1;
            std::vector<std::uint8_t> seen(g2.vertex_count(), 0);
            std::vector<Vertex> stack{s[cut.index]};
            seen[s[cut.index]] = 1;
            while (!stack.empty()) {
                const Vertex u = stack.back();
                stack.pop_back();
                for (Dart d : g2.rotation(u))
                    if (!blocked[edge_of(d)] && !seen[g2.head(d)]) seen[g2.head(d)] = 1, stack.push_back(g2.head(d));
            }
            for (Vertex v = 0; v < g2.vertex_count(); ++v)
                if (bool(seen[v]) != cut.contains(v) || cut.contains(v) != (bp.patterns.get(v, cut.index - 1) < 0)) {
                    c.fail(tag + " does not separate A_i at vertex " + std::to_string(v));
                    break;
                }
            bs.push_back(std::move(b));
        }
        const bool ok = c.passed;
        add(std::move(c));
        if (!ok) return rep;
    }

    {
        CheckResult c{"arc_disjoint"};
        std::vector<std::uint32_t> owner(g2.dart_count(), npos32);
        for (const Bisector& b : bs)
            for (Dart d : b.darts) {
                ++c.checked;
                if (owner[d] != npos32)
                    c.fail(opt.instance_id + ": dart " + std::to_string(d) + " on bisectors " +
                           std::to_string(owner[d]) + " and " + std::to_string(b.index));
                owner[d] = std::uint32_t(b.index);
            }
        add(std::move(c));
    }

    {
        CheckResult contain{"path_containment"}, disjoint{"path_bisector_disjoint"};
        const auto& s = sub.sources();
        const std::size_t L = bp.patterns.length();
        for (std::size_t sample = 0; sample < opt.path_samples; ++sample) {
            const std::size_t i = 1 + pick(L);
            const Vertex u = Vertex(pick(g2.vertex_count()));
            const bool inside = cuts[i - 1].contains(u);
            const Vertex target = inside ? s[i] : s[i - 1];
            const auto du = bfs(g2, u), dt = bfs(g2, target);
            const std::uint32_t total = du[target];
            const std::string tag = opt.instance_id + ": u=" + std::to_string(u) + " i=" + std::to_string(i);
            std::vector<std::uint8_t> on_b(g2.edge_count(), 0);
            for (Dart d : bs[i - 1].darts) on_b[edge_of(d)] = 1;
            for (Vertex v = 0; v < g2.vertex_count(); ++v) {
                if (du[v] + dt[v] != total) continue;
                ++contain.checked;
                if (cuts[i - 1].contains(v) != inside) contain.fail(tag + " v=" + std::to_string(v));
                for (Dart d : g2.rotation(v)) {
                    const Vertex w = g2.head(d);
                    if (du[v] + 1 + dt[w] != total) continue;
                    ++disjoint.checked;
                    if (on_b[edge_of(d)]) disjoint.fail(tag + " edge " + std::to_string(v) + "-" + std::to_string(w));
                }
            }
        }
        add(std::move(contain));
        add(std::move(disjoint));
    }

    std::size_t t = 0;
    if (opt.crossings) {
        CheckResult order{"crossing_order"}, parity{"crossing_parity"}, bound{"crossing_bound"};
        std::vector<CrossingReport> reports = enumerate_all_crossings(g2, bs, cuts);
        for (const auto& r : reports) {
            const std::string tag = opt.instance_id + ": pair (" + std::to_string(r.i) + "," + std::to_string(r.j) + ")";
            ++order.checked;
            ++parity.checked;
            if (!verify_crossing_order(r)) order.fail(tag);
            if (r.total_crossings % 2 || r.ambiguous_sides) parity.fail(tag);
        }
        const CrossingTotals tot = crossing_totals(reports);
        t = tot.t;
        const double limit = double(k) / 2 + opt.crossing_slack;
        bound.checked = reports.size();
        if (double(tot.max_r) > limit)
            bound.fail(opt.instance_id + ": pair (" + std::to_string(tot.max_r_i) + "," + std::to_string(tot.max_r_j) +
                       ") crosses " + std::to_string(tot.max_r) + " times");
        std::ostringstream note;
        note << "max_r=" << tot.max_r << " k/2=" << double(k) / 2 << " constant=" << double(tot.max_r) - double(k) / 2;
        bound.note = note.str();
        add(std::move(order));
        add(std::move(parity));
        add(std::move(bound));
        rep.metrics["t"] = double(tot.t);
        rep.metrics["max_r"] = double(tot.max_r);
        rep.metrics["crossing_constant"] = double(tot.max_r) - double(k) / 2;

        CheckResult count{"pattern_count_crossings"};
        count.checked = 1;
        if (dp.count > 2 * t + 2 * k)
            count.fail(opt.instance_id + ": x=" + std::to_string(dp.count) + " > 2t+2k=" + std::to_string(2 * t + 2 * k));
        add(std::move(count));
        rep.metrics["2t_plus_2k"] = double(2 * t + 2 * k);
    }
    {
        CheckResult cubic{"pattern_count_cubic"};
        cubic.checked = 1;
        if (double(dp.count) > 8.0 * double(k) * double(k) * double(k))
            cubic.fail(opt.instance_id + ": x=" + std::to_string(dp.count));
        add(std::move(cubic));
        rep.metrics["x_over_k2"] = double(dp.count) / double(k * k);
        rep.metrics["x_over_k3"] = double(dp.count) / double(k * k * k);
    }

    {
        CheckResult c{"no_shattered_4_set"};
        ShatterOptions so;
        so.seed = opt.seed;
        so.max_sets = k <= opt.exhaustive_shatter_k ? std::uint64_t(1) << 62 : opt.shatter_max_sets;
        const ShatterResult r = shattering_check(bp.patterns, 4, so);
        c.checked = r.sets_checked;
        c.note = r.exhaustive ? "exhaustive" : "sampled";
        if (r.found) {
            std::string cols;
            for (auto col : r.columns) cols += " " + std::to_string(col + 1);
            c.fail(opt.instance_id + ": columns" + cols);
        }
        add(std::move(c));

        CheckResult f{"forbidden_configuration"};
        bool exhaustive = false;
        const auto w = find_forbidden_configuration(bp.patterns, dp.representative, 4'000'000, &exhaustive);
        f.checked = dp.count;
        f.note = exhaustive ? "exhaustive" : "sampled";
        if (w)
            f.fail(opt.instance_id + ": rows " + std::to_string(w->u) + "," + std::to_string(w->v) + " at " +
                   std::to_string(w->index[0] + 1) + "," + std::to_string(w->index[1] + 1) + "," +
                   std::to_string(w->index[2] + 1) + "," + std::to_string(w->index[3] + 1));
        add(std::move(f));
    }

    {
        CheckResult dedup{"dedup_exact"}, queries{"query_exact"}, round{"serialization_roundtrip"};
        const Fingerprinter fp = Fingerprinter::from_seed(opt.seed, bp.patterns.length());
        PatternTree tree;
        const Encoding enc = encode_general(sub, bp, fp, &tree);
        dedup.checked = 1;
        if (tree.size() != dp.count)
            dedup.fail(opt.instance_id + ": tree has " + std::to_string(tree.size()) + " nodes, x=" +
                       std::to_string(dp.count));
        DistanceOracle oracle(inst);
        const auto& ts = inst.terminals();
        for (std::size_t q = 0; q < opt.queries && !ts.empty(); ++q) {
            const Vertex v = ts[pick(ts.size())];
            const std::size_t i = 1 + pick(k);
            ++queries.checked;
            if (query(enc, v, i) != oracle.distance(v, i))
                queries.fail(opt.instance_id + ": terminal " + std::to_string(v) + " source " + std::to_string(i));
        }
        round.checked = 1;
        if (!(deserialize(serialize(enc)) == enc)) round.fail(opt.instance_id);
        add(std::move(dedup));
        add(std::move(queries));
        add(std::move(round));
        rep.metrics["words"] = double(size_report(enc).total());
        rep.metrics["naive_words"] = double(k * ts.size());
    }

    if (opt.shalin_k) add(check_shalin_patterns(opt.shalin_k));
    return rep;
}

/// Word counts of the three storage schemes for S x T distances.
struct BaselineSizes {
    std::size_t matrix = 0;        // k * |T| distances
    std::size_t pattern_table = 0; // distinct ternary patterns of T, 2 bits per entry, plus base and pointer per terminal
    std::size_t encoding = 0;      // this library's encoding
    std::size_t distinct_t = 0;
    EncodingMode mode = EncodingMode::General;
};

inline BaselineSizes baseline_sizes(const OSInstance& inst, const BuildOptions& opt = {})
{
    BaselineSizes b;
    const std::size_t k = inst.k();
    const auto& ts = inst.terminals();
    b.matrix = k * ts.size();

    const SubdividedInstance sub(inst);
    const BinaryPatterns bp = compute_binary_patterns(sub, opt.threads);
    PatternMatrix tern(ts.size(), k - 1, PatternMode::Ternary);
    for (std::size_t r = 0; r < ts.size(); ++r)
        for (std::size_t i = 0; i + 1 < k; ++i)
            tern.set(r, i, (bp.patterns.get(ts[r], 2 * i) + bp.patterns.get(ts[r], 2 * i + 1)) / 2);
    b.distinct_t = distinct_patterns(tern).count;
    b.pattern_table = b.distinct_t * tern.words_per_row() + 2 * ts.size();

    BuildStats st;
    const Encoding enc = build_encoding(inst, opt, &st);
    b.encoding = size_report(enc).total();
    b.mode = enc.mode;
    return b;
}

/// One row of a probe sweep.
struct ProbeRow {
    std::string family;
    std::size_t sample = 0;
    InstanceAnalysis a;
};

/// Generator parameters that give source face size close to k for each family.
inline GeneratorSpec probe_spec(const std::string& family, std::size_t k, std::uint64_t seed)
{
    GeneratorSpec g;
    g.family = family;
    g.seed = seed;
    g.k = k;
    g.leaves = k;
    const std::size_t side = std::max<std::size_t>(2, k / 4 + 1);
    g.w = g.h = side;
    return g;
}

inline std::vector<ProbeRow> probe(const std::string& family, const std::vector<std::size_t>& ks, std::size_t samples,
                                   std::uint64_t seed, bool crossings = true, unsigned threads = 1)
{
    std::vector<ProbeRow> rows;
    std::mt19937_64 rng(seed);
    for (std::size_t k : ks)
        for (std::size_t s = 0; s < samples; ++s) {
            const OSInstance inst = make_instance(generate(probe_spec(family, k, rng())));
            rows.push_back({family, s, analyze_instance(inst, crossings, threads)});
        }
    return rows;
}

/// Least-squares slope of log x against log k.
inline double loglog_slope(const std::vector<ProbeRow>& rows)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (const auto& r : rows) {
        if (r.a.x == 0) continue;
        const double lx = std::log(double(r.a.k)), ly = std::log(double(r.a.x));
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly, ++n;
    }
    const double den = double(n) * sxx - sx * sx;
    return (n < 2 || den == 0) ? 0.0 : (double(n) * sxy - sx * sy) / den;
}

inline constexpr const char* kAnalyzeHeader = "instance_id,n,m,k,|T|,x,max_pattern_class_size";
inline constexpr const char* kCrossingsHeader =
    "instance_id,k,t,max_r,k_over_2_plus_slack_ok,x,2t_plus_2k,x_over_k2,x_over_k3";
inline constexpr const char* kProbeHeader = "family,sample,n,m,k,|T|,x,t,max_r,x_over_k2,x_over_k3";

inline std::string analyze_csv_row(const std::string& id, const InstanceAnalysis& a)
{
    std::ostringstream o;
    o << id << ',' << a.n << ',' << a.m << ',' << a.k << ',' << a.terminals << ',' << a.x << ',' << a.max_class;
    return o.str();
}

inline std::string crossings_csv_row(const std::string& id, const InstanceAnalysis& a, double slack)
{
    std::ostringstream o;
    const std::size_t t = a.crossings ? a.crossings->t : 0, max_r = a.crossings ? a.crossings->max_r : 0;
    const double k = double(a.k);
    o << id << ',' << a.k << ',' << t << ',' << max_r << ',' << (double(max_r) <= k / 2 + slack ? 1 : 0) << ','
      << a.x << ',' << 2 * t + 2 * a.k << ',' << double(a.x) / (k * k) << ',' << double(a.x) / (k * k * k);
    return o.str();
}

inline std::string probe_csv_row(const ProbeRow& r)
{
    std::ostringstream o;
    const double k = double(r.a.k);
    o << r.family << ',' << r.sample << ',' << r.a.n << ',' << r.a.m << ',' << r.a.k << ',' << r.a.terminals << ','
      << r.a.x << ',' << (r.a.crossings ? r.a.crossings->t : 0) << ',' << (r.a.crossings ? r.a.crossings->max_r : 0)
      << ',' << double(r.a.x) / (k * k) << ',' << double(r.a.x) / (k * k * k);
    return o.str();
}

} // namespace osmc
