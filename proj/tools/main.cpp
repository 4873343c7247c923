// Command line front end: per-layer community detection, pairwise composition
// along an expression, type-independent baseline, per-layer statistics and a
// one-time vs recurring cost benchmark.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hemln/hemln.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string config;
    std::uint64_t seed = 42;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    double hub_mean_factor = 1.0;
};

struct DetectOpts : CommonOpts {
    std::string expr;
    std::string metric = "we";
    std::string algo = "mwm";
    std::string out;
    std::string cache;
    bool emit_edges = false;
};

struct BenchOpts : DetectOpts {
    unsigned repeat = 3;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Distinct layers of an expression, in first-appearance order.
std::vector<std::string> expr_layers(const hemln::KCommunityExpression& e) {
    std::vector<std::string> out;
    for (const auto& l : e.layer_sequence)
        if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
    return out;
}

// Computes (or loads from cache) the artifacts of the given layers.
hemln::ArtifactStore
build_store(const hemln::MultilayerNetwork& mln, const std::vector<std::string>& layers,
            const CommonOpts& o, const std::string& cache_dir,
            std::map<std::string, double>* timings) {
    auto one = [&](const std::string& name) {
        auto t0 = std::chrono::steady_clock::now();
        const hemln::Graph& g = mln.layer(name);
        hemln::LayerArtifacts art;
        fs::path cache_file;
        if (!cache_dir.empty())
            cache_file = fs::path(cache_dir) /
                         (name + ".seed" + std::to_string(o.seed) + ".assign");
        if (!cache_file.empty() && fs::exists(cache_file)) {
            art = hemln::make_layer_artifacts(g, hemln::read_assignment(cache_file, g),
                                              o.hub_mean_factor);
        } else {
            art = hemln::compute_layer_artifacts(g, o.seed, o.hub_mean_factor);
            if (!cache_file.empty()) {
                fs::create_directories(cache_file.parent_path());
                hemln::write_assignment(cache_file, g, art.assignment);
            }
        }
        double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return std::make_pair(std::move(art), dt);
    };

    hemln::ArtifactStore store;
    if (o.threads <= 1 || layers.size() <= 1) {
        for (const auto& name : layers) {
            auto [art, dt] = one(name);
            if (timings) (*timings)[name] = dt;
            store[name] = std::move(art);
        }
    } else {
        std::vector<std::future<std::pair<hemln::LayerArtifacts, double>>> futs;
        for (const auto& name : layers)
            futs.push_back(std::async(std::launch::async, one, name));
        for (std::size_t i = 0; i < layers.size(); ++i) {
            auto [art, dt] = futs[i].get();
            if (timings) (*timings)[layers[i]] = dt;
            store[layers[i]] = std::move(art);
        }
    }
    return store;
}

void print_step(const hemln::StepSummary& s) {
    std::cout << "step." << s.index << " case=" << hemln::to_string(s.step_case)
              << " left=" << s.left << " right=" << s.right << " cbg=" << s.cbg_left
              << "x" << s.cbg_right << " meta_edges=" << s.cbg_edges
              << " pairs=" << s.pair_count << " raw=" << s.selected_raw
              << " weight=" << fmt(s.selected_weight)
              << " consistent=" << s.consistent << " no_match=" << s.no_match
              << " inconsistent=" << s.inconsistent << " time=" << fmt(s.seconds)
              << "\n";
}

int run_detect(const DetectOpts& o) {
    hemln::MultilayerNetwork mln = hemln::load_mln(o.config);
    hemln::KCommunityExpression expr = hemln::parse_expression(o.expr, mln);
    hemln::WeightMetric metric = hemln::parse_metric(o.metric);
    hemln::PairingAlgorithm algo = hemln::parse_algorithm(o.algo);

    std::cout << "expression=" << expr.unparse() << "\n";
    std::cout << "metric=" << o.metric << " algorithm=" << o.algo << "\n";
    std::cout << "seed=" << o.seed << " threads=" << o.threads << "\n";

    std::map<std::string, double> timings;
    auto store = build_store(mln, expr_layers(expr), o, o.cache, &timings);
    for (const auto& [layer, dt] : timings) {
        const auto& art = store.at(layer);
        std::size_t ge2 = 0;
        for (const auto& m : art.assignment.members) ge2 += m.size() >= 2;
        std::cout << "onetime." << layer << " communities="
                  << art.assignment.community_count() << " size_ge2=" << ge2
                  << " time=" << fmt(dt) << "\n";
    }

    auto result = hemln::evaluate_k_community(mln, expr, metric, algo, store);
    for (const auto& s : result.steps) print_step(s);
    for (const auto& w : result.warnings) std::cout << "warning=" << w << "\n";
    std::cout << "tuples=" << result.tuples.size() << " total="
              << result.total_count() << " partial=" << result.partial_count()
              << "\n";

    if (!o.out.empty()) {
        std::ofstream out(o.out);
        if (!out) throw hemln::FileError("cannot write " + o.out);
        hemln::write_tuple_table(out, result);
        std::cout << "table=" << o.out << "\n";
        if (o.emit_edges) {
            std::string epath = o.out + ".edges";
            std::ofstream eout(epath);
            if (!eout) throw hemln::FileError("cannot write " + epath);
            hemln::write_tuple_edges(eout, result, mln);
            std::cout << "edges=" << epath << "\n";
        }
    } else {
        hemln::write_tuple_table(std::cout, result);
        if (o.emit_edges) hemln::write_tuple_edges(std::cout, result, mln);
    }
    return 0;
}

int run_baseline(const CommonOpts& o) {
    hemln::MultilayerNetwork mln = hemln::load_mln(o.config);
    hemln::BaselineResult r = hemln::baseline_modularity(mln, o.seed);
    std::size_t ge2 = 0;
    for (const auto& m : r.assignment.members) ge2 += m.size() >= 2;
    std::cout << "seed=" << o.seed << "\n";
    std::cout << "nodes=" << r.nodes << " edges=" << r.edges << "\n";
    std::cout << "communities=" << r.assignment.community_count()
              << " size_ge2=" << ge2 << "\n";
    std::cout << "modularity=" << fmt(r.modularity) << "\n";
    return 0;
}

int run_stats(const CommonOpts& o) {
    hemln::MultilayerNetwork mln = hemln::load_mln(o.config);
    std::vector<std::string> layers;
    for (std::size_t i = 0; i < mln.layer_count(); ++i)
        layers.push_back(mln.layer(i).name());
    auto store = build_store(mln, layers, o, "", nullptr);

    std::cout << "seed=" << o.seed << "\n";
    std::cout << "layer\tnodes\tedges\tcommunities\tsize_ge2\tavg_size_ge2\t"
                 "max_size\tsingletons\tmodularity\n";
    for (const auto& name : layers) {
        const hemln::Graph& g = mln.layer(name);
        const auto& art = store.at(name);
        std::size_t ge2 = 0, ge2_members = 0, max_size = 0, singles = 0;
        for (const auto& m : art.assignment.members) {
            max_size = std::max(max_size, m.size());
            if (m.size() >= 2) {
                ++ge2;
                ge2_members += m.size();
            } else {
                ++singles;
            }
        }
        double avg = ge2 ? static_cast<double>(ge2_members) /
                               static_cast<double>(ge2)
                         : 0.0;
        std::cout << name << "\t" << g.node_count() << "\t" << g.edge_count() << "\t"
                  << art.assignment.community_count() << "\t" << ge2 << "\t"
                  << fmt(avg) << "\t" << max_size << "\t" << singles << "\t"
                  << fmt(g.edge_count() ? hemln::newman_modularity(g, art.assignment)
                                        : 0.0)
                  << "\n";
    }
    std::size_t pairs = mln.coupled_pairs().size();
    std::cout << "interlayer_pairs=" << pairs
              << " interlayer_edges=" << mln.total_inter_edges() << "\n";
    return 0;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int run_bench(const BenchOpts& o) {
    hemln::MultilayerNetwork mln = hemln::load_mln(o.config);
    hemln::KCommunityExpression expr = hemln::parse_expression(o.expr, mln);
    hemln::WeightMetric metric = hemln::parse_metric(o.metric);
    hemln::PairingAlgorithm algo = hemln::parse_algorithm(o.algo);
    auto layers = expr_layers(expr);

    std::map<std::string, std::vector<double>> onetime;
    std::vector<std::vector<double>> per_step;
    std::vector<double> recurring;
    for (unsigned rep = 0; rep < o.repeat; ++rep) {
        std::map<std::string, double> timings;
        auto store = build_store(mln, layers, o, "", &timings);
        for (const auto& [layer, dt] : timings) onetime[layer].push_back(dt);

        auto t0 = std::chrono::steady_clock::now();
        auto result = hemln::evaluate_k_community(mln, expr, metric, algo, store);
        recurring.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count());
        per_step.resize(result.steps.size());
        for (std::size_t s = 0; s < result.steps.size(); ++s)
            per_step[s].push_back(result.steps[s].seconds);
    }

    std::cout << "repeat=" << o.repeat << " seed=" << o.seed
              << " threads=" << o.threads << "\n";
    double total_onetime = 0.0, max_onetime = 0.0;
    for (auto& [layer, v] : onetime) {
        double m = median(v);
        total_onetime += m;
        max_onetime = std::max(max_onetime, m);
        std::cout << "onetime." << layer << "=" << fmt(m) << "\n";
    }
    std::cout << "onetime.total=" << fmt(total_onetime) << "\n";
    std::cout << "onetime.max=" << fmt(max_onetime) << "\n";
    double rec = median(recurring);
    for (std::size_t s = 0; s < per_step.size(); ++s)
        std::cout << "recurring.step" << (s + 1) << "=" << fmt(median(per_step[s]))
                  << "\n";
    std::cout << "recurring.total=" << fmt(rec) << "\n";
    if (total_onetime > 0)
        std::cout << "ratio.recurring_vs_onetime=" << fmt(rec / total_onetime) << "\n";
    return 0;
}

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config, "network config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "community detection seed (default 42)");
    cmd->add_option("--threads", o.threads, "worker threads for per-layer detection")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--hub-mean-factor", o.hub_mean_factor,
                    "hub threshold: intra-degree > factor * community mean")
        ->check(CLI::NonNegativeNumber);
}

void add_detect_opts(CLI::App* cmd, DetectOpts& o) {
    add_common(cmd, o);
    cmd->add_option("--expr", o.expr, "composition expression, e.g. \"A *[A,D] D\"")
        ->required();
    cmd->add_option("--metric", o.metric, "meta edge weight metric")
        ->check(CLI::IsMember({"we", "wd", "wh"}));
    cmd->add_option("--algo", o.algo, "pairing algorithm")
        ->check(CLI::IsMember({"mwm", "mwpm", "mwrm", "mwmt"}));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"community composition over heterogeneous multilayer networks"};
    app.require_subcommand(1);

    DetectOpts detect_o;
    auto* detect = app.add_subcommand(
        "detect", "evaluate a composition expression into k-community tuples");
    add_detect_opts(detect, detect_o);
    detect->add_option("--out", detect_o.out, "write the tuple table to this file");
    detect->add_flag("--emit-edges", detect_o.emit_edges,
                     "also write per-tuple couplings (<out>.edges)");
    detect->add_option("--cache", detect_o.cache,
                       "directory for per-layer assignment reuse");

    CommonOpts baseline_o;
    auto* baseline = app.add_subcommand(
        "baseline", "type-independent modularity of the collapsed network");
    add_common(baseline, baseline_o);

    CommonOpts stats_o;
    auto* stats = app.add_subcommand("stats", "per-layer community statistics");
    add_common(stats, stats_o);

    BenchOpts bench_o;
    auto* bench = app.add_subcommand(
        "bench", "median one-time vs recurring composition cost");
    add_detect_opts(bench, bench_o);
    bench->add_option("--repeat", bench_o.repeat, "timing repetitions (default 3)")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (detect->parsed()) return run_detect(detect_o);
        if (baseline->parsed()) return run_baseline(baseline_o);
        if (stats->parsed()) return run_stats(stats_o);
        if (bench->parsed()) return run_bench(bench_o);
    } catch (const hemln::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
