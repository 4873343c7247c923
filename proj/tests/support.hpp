#pragma once

// Shared helpers for the unit and acceptance suites: terse graph/network
// builders, an exhaustive modularity search, a random CBG generator and a
// scratch-directory guard.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "hemln/hemln.hpp"

namespace support {

// --------------------------------------------------------------------------
// Builders
// --------------------------------------------------------------------------

inline hemln::Graph make_graph(
    const std::string& name,
    const std::vector<std::pair<std::string, std::string>>& edges,
    const std::vector<std::string>& extra_nodes = {}) {
    hemln::GraphBuilder b(name);
    for (const auto& [u, v] : edges) b.add_edge(u, v);
    for (const auto& n : extra_nodes) b.add_node(n);
    return b.build();
}

// A layer described as node groups; the builder cliques each group so that
// every multi-node community is internally connected.
struct HandLayer {
    std::string name;
    std::vector<std::vector<std::string>> groups; // group g -> community g+1
};

struct HandCoupling {
    std::string left, right;
    std::vector<std::pair<std::string, std::string>> links;
};

struct HandMln {
    hemln::MultilayerNetwork mln;
    hemln::ArtifactStore store;
};

inline HandMln make_hand_mln(const std::vector<HandLayer>& layers,
                             const std::vector<HandCoupling>& couplings) {
    hemln::MlnDraft draft;
    for (const auto& l : layers) {
        hemln::GraphBuilder b(l.name);
        for (const auto& group : l.groups) {
            for (const auto& n : group) b.add_node(n);
            for (std::size_t i = 0; i < group.size(); ++i)
                for (std::size_t j = i + 1; j < group.size(); ++j)
                    b.add_edge(group[i], group[j]);
        }
        draft.layers.push_back(b.build());
    }
    for (const auto& c : couplings) draft.interlayer.push_back({c.left, c.right, c.links});

    HandMln out{hemln::MultilayerNetwork::from_draft(std::move(draft)), {}};
    for (const auto& l : layers) {
        const hemln::Graph& g = out.mln.layer(l.name);
        std::vector<int> membership(g.node_count(), 0);
        for (std::size_t gi = 0; gi < l.groups.size(); ++gi)
            for (const auto& n : l.groups[gi])
                membership[*g.find(n)] = static_cast<int>(gi) + 1;
        out.store[l.name] = hemln::make_layer_artifacts(
            g, hemln::CommunityAssignment::from_membership(l.name, membership));
    }
    return out;
}

// Couplings of one tuple step, written with labels for readable expectations.
inline std::vector<std::pair<std::string, std::string>>
labelled_couplings(const hemln::CouplingSet& xs, const hemln::Graph& left,
                   const hemln::Graph& right) {
    std::vector<std::pair<std::string, std::string>> out;
    for (auto [u, v] : xs) out.emplace_back(left.label(u), right.label(v));
    return out;
}

// --------------------------------------------------------------------------
// Exhaustive modularity search (restricted-growth enumeration of partitions)
// --------------------------------------------------------------------------

inline double best_partition_modularity(const hemln::Graph& g) {
    const std::size_t n = g.node_count();
    if (n == 0) return 0.0;
    if (n > 10) throw hemln::TooLargeError("exhaustive partition search beyond 10 nodes");
    std::vector<int> rgs(n, 0); // restricted growth string, 0-based blocks
    double best = -1.0;
    while (true) {
        std::vector<int> membership(n);
        for (std::size_t i = 0; i < n; ++i) membership[i] = rgs[i] + 1;
        best = std::max(best, hemln::newman_modularity(g, membership));

        // next restricted growth string
        std::size_t i = n;
        bool done = true;
        while (i-- > 1) {
            int max_prefix = 0;
            for (std::size_t j = 0; j < i; ++j) max_prefix = std::max(max_prefix, rgs[j]);
            if (rgs[i] <= max_prefix) {
                ++rgs[i];
                for (std::size_t j = i + 1; j < n; ++j) rgs[j] = 0;
                done = false;
                break;
            }
        }
        if (done) break;
    }
    return best;
}

// --------------------------------------------------------------------------
// Random CBG instances for pairing fuzz tests
// --------------------------------------------------------------------------

inline hemln::CommunityBipartiteGraph random_cbg(std::mt19937_64& rng,
                                                 std::size_t max_side,
                                                 int max_weight) {
    std::uniform_int_distribution<std::size_t> side(1, max_side);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t nl = side(rng), nr = side(rng);
    double p = 0.1 + 0.8 * unit(rng);
    std::uniform_int_distribution<int> w(1, max_weight);
    std::vector<std::tuple<std::size_t, std::size_t, double, std::size_t>> edges;
    for (std::size_t l = 0; l < nl; ++l)
        for (std::size_t r = 0; r < nr; ++r)
            if (unit(rng) < p) {
                int wi = w(rng);
                edges.emplace_back(l, r, static_cast<double>(wi),
                                   static_cast<std::size_t>(wi));
            }
    return hemln::CommunityBipartiteGraph::for_testing_raw(nl, nr, edges);
}

inline hemln::CommunityBipartiteGraph transpose(const hemln::CommunityBipartiteGraph& g) {
    hemln::CommunityBipartiteGraph t;
    t.left_layer = g.right_layer;
    t.right_layer = g.left_layer;
    t.metric = g.metric;
    t.left_nodes = g.right_nodes;
    t.right_nodes = g.left_nodes;
    for (const auto& e : g.edges) {
        hemln::MetaEdge f;
        f.left = e.right;
        f.right = e.left;
        f.raw_count = e.raw_count;
        f.weight = e.weight;
        for (auto [u, v] : e.expanded) f.expanded.emplace_back(v, u);
        std::sort(f.expanded.begin(), f.expanded.end());
        t.edges.push_back(std::move(f));
    }
    std::sort(t.edges.begin(), t.edges.end(), [](const auto& a, const auto& b) {
        return std::make_pair(a.left, a.right) < std::make_pair(b.left, b.right);
    });
    return t;
}

// Selected edges as (left community, right community) pairs, orientation of
// the given CBG.
inline std::vector<std::pair<int, int>>
selected_pairs(const hemln::CommunityBipartiteGraph& g, const hemln::Pairing& p) {
    std::vector<std::pair<int, int>> out;
    for (std::size_t ei : p.selected)
        out.emplace_back(g.left_nodes[g.edges[ei].left].community,
                         g.right_nodes[g.edges[ei].right].community);
    std::sort(out.begin(), out.end());
    return out;
}

inline bool is_matching(const hemln::CommunityBipartiteGraph& g,
                        const hemln::Pairing& p) {
    std::set<std::size_t> ls, rs;
    for (std::size_t ei : p.selected) {
        if (!ls.insert(g.edges[ei].left).second) return false;
        if (!rs.insert(g.edges[ei].right).second) return false;
    }
    return true;
}

// --------------------------------------------------------------------------
// Scratch directories and CLI invocation
// --------------------------------------------------------------------------

class ScratchDir {
public:
    explicit ScratchDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("hemln-" + tag + "-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

struct CliResult {
    int exit_code = -1;
    std::string output; // stdout + stderr
};

inline CliResult run_cli(const std::string& args, const std::filesystem::path& scratch) {
    std::filesystem::path out_file = scratch / "cli_output.txt";
    std::string cmd = std::string(HEMLN_CLI_PATH) + " " + args + " > " +
                      out_file.string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    CliResult r;
    if (rc == -1)
        r.exit_code = -1;
    else
        r.exit_code = WEXITSTATUS(rc);
    std::ifstream in(out_file);
    std::string line;
    while (std::getline(in, line)) r.output += line + "\n";
    return r;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return s;
}

} // namespace support
