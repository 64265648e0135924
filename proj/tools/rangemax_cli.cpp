#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rangemax/index_file.hpp"
#include "rangemax/text_io.hpp"

using namespace rangemax;

namespace {

// keeps the timed loop from being optimized away
volatile std::size_t g_sink = 0;

struct Options {
    std::size_t n = 64;
    std::uint64_t seed = 1;
    std::string input;
    std::string queries;
    std::string index;
    std::string out;
    std::uint32_t lambda_override = 0;
    std::uint32_t base_threshold = 0;
    std::string format;
    std::size_t trials = 1000;
    std::vector<std::size_t> sizes;
};

BuildConfig config_of(const Options& o) {
    BuildConfig cfg;
    cfg.lambda_override = o.lambda_override;
    cfg.base_threshold = o.base_threshold;
    return cfg;
}

// points from --input, else a random set from --n/--seed
PointSet points_of(const Options& o) {
    if (!o.input.empty()) return read_points_file(o.input);
    return random_point_set(o.n, o.seed);
}

std::vector<QueryRect> queries_of(const std::string& path) {
    if (path.empty() || path == "-") return read_queries(std::cin);
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    return read_queries(f);
}

// writes to --out or stdout
void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f || !(f << text)) throw std::runtime_error("cannot write " + out);
}

int cmd_gen(const Options& o) {
    PointSet ps = random_point_set(o.n, o.seed);
    std::ostringstream s;
    if (o.format == "binary") {
        write_points_binary(s, ps);
    } else if (o.format.empty() || o.format == "text") {
        write_points(s, ps);
    } else {
        throw CLI::ValidationError("--format", "gen expects text or binary");
    }
    emit(o.out, s.str());
    return 0;
}

int cmd_build(const Options& o) {
    if (o.out.empty()) throw CLI::RequiredError("--out");
    RangeMaxTree t = RangeMaxTree::build(points_of(o), config_of(o));
    save_index(t, o.out);
    TreeSummary s = t.summary();
    std::cerr << "n=" << t.size() << " padded=" << t.padded_size() << " depth=" << s.depth
              << " nodes=" << s.nodes << " budget_violations=" << s.budget_violations << "\n";
    return 0;
}

RangeMaxTree tree_of(const Options& o) {
    if (!o.index.empty()) return load_index(o.index);
    return RangeMaxTree::build(points_of(o), config_of(o));
}

int cmd_query(const Options& o) {
    if (o.index.empty() && o.input.empty()) throw CLI::RequiredError("--index or --input");
    RangeMaxTree t = tree_of(o);
    std::ostringstream s;
    for (const auto& q : queries_of(o.queries)) s << format_answer(t.query(q)) << "\n";
    emit(o.out, s.str());
    return 0;
}

int cmd_verify(const Options& o) {
    PointSet ps = points_of(o);
    RangeMaxTree t = RangeMaxTree::build(ps, config_of(o));
    IndexImage img = write_index(t);
    RangeMaxTree u = read_index(img.bytes);
    bool identical = write_index(RangeMaxTree::build(ps, config_of(o))).bytes == img.bytes;

    std::mt19937_64 rng(o.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<QueryRect> qs = random_queries(ps.size(), o.trials, rng, false);
    auto open = random_queries(ps.size(), o.trials, rng, true);
    qs.insert(qs.end(), open.begin(), open.end());
    if (!o.queries.empty()) {
        auto extra = queries_of(o.queries);
        qs.insert(qs.end(), extra.begin(), extra.end());
    }

    std::size_t mismatches = 0, over_bound = 0;
    std::size_t bound = 13 * (t.depth() + 1) + 1;
    for (const auto& q : qs) {
        QueryStats st;
        auto want = brute_force_max(ps, q);
        auto got = t.query(q, &st);
        if (got != want || u.query(q) != want) {
            if (mismatches < 5) {
                std::cerr << "mismatch: " << q.x_lo << " " << q.y_lo << " " << q.x_hi << " "
                          << q.y_hi << " want " << format_answer(want) << " got "
                          << format_answer(got) << "\n";
            }
            ++mismatches;
        }
        over_bound += st.candidates > bound ? 1 : 0;
    }
    std::size_t violations = t.summary().budget_violations;
    std::cout << "queries " << qs.size() << "\n"
              << "mismatches " << mismatches << "\n"
              << "candidate_bound_exceeded " << over_bound << "\n"
              << "budget_violations " << violations << "\n"
              << "deterministic " << (identical ? 1 : 0) << "\n";
    return mismatches == 0 && over_bound == 0 && violations == 0 && identical ? 0 : 1;
}

int cmd_bench(const Options& o) {
    std::vector<std::size_t> sizes = o.sizes;
    if (sizes.empty()) sizes = {1024, 2048, 4096, 8192, 16384};
    std::ostringstream s;
    s << "n,padded_n,depth,queries,build_ms,mean_query_us,mean_candidates,max_candidates,"
         "candidate_bound,file_bytes\n";
    using clock = std::chrono::steady_clock;
    for (std::size_t n : sizes) {
        PointSet ps = random_point_set(n, o.seed + n);
        auto b0 = clock::now();
        RangeMaxTree t = RangeMaxTree::build(ps, config_of(o));
        double build_ms = std::chrono::duration<double, std::milli>(clock::now() - b0).count();
        std::mt19937_64 rng(o.seed * 31 + n);
        auto qs = random_queries(n, o.trials, rng, false);
        auto open = random_queries(n, o.trials, rng, true);
        qs.insert(qs.end(), open.begin(), open.end());

        std::size_t cand = 0, max_cand = 0, sink = 0;
        auto q0 = clock::now();
        for (const auto& q : qs) {
            QueryStats st;
            auto r = t.query(q, &st);
            sink += r ? r->priority : 0;
            cand += st.candidates;
            max_cand = std::max(max_cand, st.candidates);
        }
        double us = std::chrono::duration<double, std::micro>(clock::now() - q0).count();
        double m = qs.empty() ? 0.0 : double(qs.size());
        s << n << "," << t.padded_size() << "," << t.depth() << "," << qs.size() << ","
          << build_ms << "," << (m > 0 ? us / m : 0.0) << "," << (m > 0 ? cand / m : 0.0)
          << "," << max_cand << "," << 13 * (t.depth() + 1) + 1 << ","
          << write_index(t).bytes.size() << "\n";
        g_sink = sink;
    }
    emit(o.out, s.str());
    return 0;
}

int cmd_space(const Options& o) {
    SpaceReport rep = space_report(tree_of(o));
    if (o.format.empty() || o.format == "csv") {
        emit(o.out, rep.csv());
    } else if (o.format == "jsonl" || o.format == "json") {
        emit(o.out, rep.json_lines());
    } else {
        throw CLI::ValidationError("--format", "space expects csv or jsonl");
    }
    return rep.all_ok() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Orthogonal range-maximum index"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* c) {
        c->add_option("--n", o.n, "number of points for generated instances");
        c->add_option("--seed", o.seed, "random seed");
        c->add_option("--lambda-override", o.lambda_override, "fixed lambda for two-sided indexes");
        c->add_option("--base-threshold", o.base_threshold, "leaf size threshold");
        c->add_option("--out", o.out, "output path (default stdout)");
    };

    auto* gen = app.add_subcommand("gen", "write a random points file");
    common(gen);
    gen->add_option("--format", o.format, "text or binary")->check(CLI::IsMember({"text", "binary"}));

    auto* build = app.add_subcommand("build", "points file to index file");
    common(build);
    build->add_option("--input", o.input, "points file")->check(CLI::ExistingFile);

    auto* query = app.add_subcommand("query", "answer a queries file");
    common(query);
    query->add_option("--index", o.index, "index file")->check(CLI::ExistingFile);
    query->add_option("--input", o.input, "points file, built in memory")->check(CLI::ExistingFile);
    query->add_option("--queries", o.queries, "queries file (default stdin)");

    auto* verify = app.add_subcommand("verify", "compare against the brute-force oracle");
    common(verify);
    verify->add_option("--input", o.input, "points file")->check(CLI::ExistingFile);
    verify->add_option("--queries", o.queries, "extra queries file");
    verify->add_option("--trials", o.trials, "random queries per kind");

    auto* bench = app.add_subcommand("bench", "timing and candidate counts as CSV");
    common(bench);
    bench->add_option("--sizes", o.sizes, "sizes, comma separated")->delimiter(',');
    bench->add_option("--trials", o.trials, "random queries per kind");

    auto* space = app.add_subcommand("space", "bit-level space report");
    common(space);
    space->add_option("--index", o.index, "index file")->check(CLI::ExistingFile);
    space->add_option("--input", o.input, "points file")->check(CLI::ExistingFile);
    space->add_option("--format", o.format, "csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl", "json"}));

    CLI11_PARSE(app, argc, argv);
    try {
        if (gen->parsed()) return cmd_gen(o);
        if (build->parsed()) return cmd_build(o);
        if (query->parsed()) return cmd_query(o);
        if (verify->parsed()) return cmd_verify(o);
        if (bench->parsed()) return cmd_bench(o);
        if (space->parsed()) return cmd_space(o);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
