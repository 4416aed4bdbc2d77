// osmc: generate instances, build and query encodings, run the property suites.
//
// Exit codes: 0 all checks pass, 1 a property check failed, 2 I/O or format error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "osmc/osmc.hpp"

namespace {

using nlohmann::json;

struct Globals {
    std::uint64_t seed = 1;
    unsigned threads = 1;
    bool json = false;
};

json to_json(const osmc::VerificationReport& r)
{
    json j;
    j["instance_id"] = r.instance_id;
    j["ok"] = r.ok();
    for (const auto& c : r.checks)
        j["checks"].push_back({{"name", c.name},
                               {"passed", c.passed},
                               {"checked", c.checked},
                               {"violations", c.violations},
                               {"reproducer", c.reproducer},
                               {"note", c.note}});
    for (const auto& [k, v] : r.metrics) j["metrics"][k] = v;
    return j;
}

json to_json(const osmc::SizeReport& s)
{
    return {{"header", s.header},
            {"index_nodes", s.index_nodes},
            {"index_leaves", s.index_leaves},
            {"versions", s.versions},
            {"terminal_table", s.terminal_table},
            {"total", s.total()}};
}

// Writes to the file if a path is given, otherwise to stdout.
void emit(const std::string& path, const std::string& text)
{
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw osmc::Error(osmc::ErrorCode::Io, "cannot open " + path + " for writing");
    out << text;
}

osmc::OSInstance load(const std::string& path) { return osmc::make_instance(osmc::load_osg(path)); }

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Compression and analysis of Okamura-Seymour distance patterns"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "Seed for generators, fingerprints and sampling");
    app.add_option("--threads", g.threads, "Worker threads for the per-source BFS runs")->check(CLI::Range(1u, 256u));
    app.add_flag("--json", g.json, "Machine-readable output");

    // generate
    auto* gen = app.add_subcommand("generate", "Write a generated instance as .osg");
    osmc::GeneratorSpec gs;
    std::string terminals = "all", gen_out;
    gen->add_option("--family", gs.family, "cycle | grid | random-planar | halin | shalin-lower")->required();
    gen->add_option("--width", gs.w, "Grid width");
    gen->add_option("--height", gs.h, "Grid height");
    gen->add_option("--k", gs.k, "Cycle length, or k for shalin-lower");
    gen->add_option("--leaves", gs.leaves, "Halin leaf count");
    gen->add_option("--rate", gs.rate, "Interior edge deletion rate for random-planar");
    gen->add_option("--terminals", terminals, "all | boundary | random:F | blob:F");
    gen->add_option("--out", gen_out, "Output path (stdout if omitted)");

    // compress
    auto* comp = app.add_subcommand("compress", "Build an encoding");
    std::string comp_in, comp_out, comp_mode = "auto";
    comp->add_option("--in", comp_in, "Instance (.osg)")->required();
    comp->add_option("--mode", comp_mode, "auto | general | connected | face");
    comp->add_option("--out", comp_out, "Encoding path (.osmc)")->required();

    // query
    auto* qry = app.add_subcommand("query", "Distance from a terminal to a source");
    std::string q_enc;
    osmc::Vertex q_v = 0;
    std::size_t q_i = 1;
    bool q_mid = false;
    qry->add_option("--enc", q_enc, "Encoding (.osmc)")->required();
    qry->add_option("--terminal", q_v, "Terminal vertex id")->required();
    qry->add_option("--source", q_i, "1-based source index (into S, or S' with --include-midpoints)")->required();
    qry->add_flag("--include-midpoints", q_mid, "Index the subdivided face s'_1 w_1 s'_2 ...; answers in G' hops");

    // verify
    auto* ver = app.add_subcommand("verify", "Run every property suite on an instance");
    std::string v_in;
    osmc::VerifyOptions vo;
    ver->add_option("--in", v_in, "Instance (.osg)")->required();
    ver->add_option("--crossing-slack", vo.crossing_slack, "Allowed additive constant over k/2 in the crossing bound");
    ver->add_option("--path-samples", vo.path_samples, "Sampled (u, i) pairs for the shortest-path suites");
    ver->add_option("--exhaustive-k", vo.exhaustive_shatter_k, "Largest k for the exhaustive 4-column shattering check");
    ver->add_option("--queries", vo.queries, "Random encoding queries checked against BFS");
    ver->add_option("--shalin-k", vo.shalin_k, "Also check the closed-form lower-bound patterns for this k");

    // analyze
    auto* ana = app.add_subcommand("analyze", "Per-instance pattern counts as CSV");
    std::vector<std::string> a_in;
    std::string a_out;
    bool a_cross = false;
    double a_slack = 2.0;
    ana->add_option("--in", a_in, "Instances (.osg)")->required();
    ana->add_flag("--crossings", a_cross, "Enumerate bisector crossings too");
    ana->add_option("--crossing-slack", a_slack, "Additive constant for the k/2 crossing bound column");
    ana->add_option("--out", a_out, "CSV path (stdout if omitted)");

    // probe
    auto* prb = app.add_subcommand("probe", "Sweep k for a family and fit log x against log k");
    std::string p_family = "shalin-lower", p_out;
    std::vector<std::size_t> p_ks{8, 16, 32, 64};
    std::size_t p_samples = 1;
    bool p_no_cross = false;
    prb->add_option("--family", p_family, "Generator family");
    prb->add_option("--k", p_ks, "Values of k")->delimiter(',');
    prb->add_option("--samples", p_samples, "Samples per k");
    prb->add_flag("--no-crossings", p_no_cross, "Skip crossing enumeration");
    prb->add_option("--out", p_out, "CSV path (stdout if omitted)");

    // baseline
    auto* base = app.add_subcommand("baseline", "Compare encoding size with the full matrix and the pattern table");
    std::string b_in, b_mode = "auto";
    base->add_option("--in", b_in, "Instance (.osg)")->required();
    base->add_option("--mode", b_mode, "Encoding mode");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*gen) {
            gs.seed = g.seed;
            gs.terminals = osmc::TerminalPolicy::parse(terminals);
            const osmc::InstanceSpec spec = osmc::generate(gs);
            emit(gen_out, osmc::to_osg(spec));
            return 0;
        }
        if (*comp) {
            const osmc::OSInstance inst = load(comp_in);
            osmc::BuildOptions opt;
            opt.mode = osmc::parse_mode(comp_mode);
            opt.seed = g.seed;
            opt.threads = g.threads;
            osmc::BuildStats st;
            const auto t0 = std::chrono::steady_clock::now();
            const osmc::Encoding enc = osmc::build_encoding(inst, opt, &st);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            osmc::write_encoding(comp_out, enc);
            const osmc::SizeReport sz = osmc::size_report(enc);
            if (g.json) {
                json j{{"mode", osmc::to_string(enc.mode)}, {"k", enc.k},     {"x", enc.x},
                       {"seed", enc.seed},                  {"versions", enc.index.version_count()},
                       {"words", to_json(sz)},              {"build_seconds", secs}};
                if (st.pattern_changes) j["face_pattern_changes"] = *st.pattern_changes;
                for (const auto& [m, w] : st.candidates) j["candidates"][osmc::to_string(m)] = w;
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << "mode " << osmc::to_string(enc.mode) << ", k " << enc.k << ", versions "
                          << enc.index.version_count() << ", words " << sz.total() << " (nodes " << sz.index_nodes
                          << ", leaves " << sz.index_leaves << ", versions " << sz.versions << ", terminals "
                          << sz.terminal_table << "), " << secs << " s\n";
            }
            return 0;
        }
        if (*qry) {
            const osmc::Encoding enc = osmc::read_encoding(q_enc);
            const long long d = q_mid ? osmc::query_subdivided(enc, q_v, q_i) : osmc::query(enc, q_v, q_i);
            if (g.json)
                std::cout << json{{"terminal", q_v}, {"source", q_i}, {"subdivided", q_mid}, {"distance", d}}.dump()
                          << "\n";
            else
                std::cout << d << "\n";
            return 0;
        }
        if (*ver) {
            const osmc::OSInstance inst = load(v_in);
            vo.instance_id = v_in;
            vo.seed = g.seed;
            vo.threads = g.threads;
            const osmc::VerificationReport r = osmc::verify(inst, vo);
            if (g.json) {
                std::cout << to_json(r).dump(2) << "\n";
            } else {
                for (const auto& c : r.checks) {
                    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.checked << " checked";
                    if (!c.note.empty()) std::cout << "; " << c.note;
                    std::cout << ")";
                    if (!c.passed) std::cout << " -- " << c.violations << " violations, first: " << c.reproducer;
                    std::cout << "\n";
                }
                for (const auto& [k, v] : r.metrics) std::cout << k << " = " << v << "\n";
            }
            return r.ok() ? 0 : 1;
        }
        if (*ana) {
            std::ostringstream csv;
            csv << (a_cross ? osmc::kCrossingsHeader : osmc::kAnalyzeHeader) << "\n";
            bool ok = true;
            for (const auto& path : a_in) {
                const osmc::OSInstance inst = load(path);
                const auto a = osmc::analyze_instance(inst, a_cross, g.threads);
                if (a_cross) {
                    csv << osmc::crossings_csv_row(path, a, a_slack) << "\n";
                    ok = ok && double(a.crossings->max_r) <= double(a.k) / 2 + a_slack &&
                         a.x <= 2 * a.crossings->t + 2 * a.k;
                } else {
                    csv << osmc::analyze_csv_row(path, a) << "\n";
                }
            }
            emit(a_out, csv.str());
            return ok ? 0 : 1;
        }
        if (*prb) {
            const auto rows = osmc::probe(p_family, p_ks, p_samples, g.seed, !p_no_cross, g.threads);
            std::ostringstream csv;
            csv << osmc::kProbeHeader << "\n";
            for (const auto& r : rows) csv << osmc::probe_csv_row(r) << "\n";
            emit(p_out, csv.str());
            double c2 = 0;
            for (const auto& r : rows) c2 = std::max(c2, double(r.a.x) / double(r.a.k * r.a.k));
            std::cerr << "log-log slope of x against k: " << osmc::loglog_slope(rows) << ", max x/k^2: " << c2
                      << "\n";
            return 0;
        }
        if (*base) {
            const osmc::OSInstance inst = load(b_in);
            osmc::BuildOptions opt;
            opt.mode = osmc::parse_mode(b_mode);
            opt.seed = g.seed;
            opt.threads = g.threads;
            const osmc::BaselineSizes b = osmc::baseline_sizes(inst, opt);
            if (g.json) {
                std::cout << json{{"matrix", b.matrix},
                                  {"pattern_table", b.pattern_table},
                                  {"encoding", b.encoding},
                                  {"encoding_mode", osmc::to_string(b.mode)},
                                  {"distinct_terminal_patterns", b.distinct_t}}
                                 .dump(2)
                          << "\n";
            } else {
                std::cout << "scheme,words\nmatrix," << b.matrix << "\npattern_table," << b.pattern_table
                          << "\nencoding_" << osmc::to_string(b.mode) << "," << b.encoding << "\n";
            }
            return 0;
        }
    } catch (const osmc::Error& e) {
        std::cerr << "osmc: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "osmc: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
