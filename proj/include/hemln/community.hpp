#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hemln/errors.hpp"
#include "hemln/graph.hpp"

namespace hemln {

// ---------------------------------------------------------------------------
// Community assignments
//
// Communities are numbered 1..k; 0 never appears in a valid assignment (it is
// reserved as the "no community" sentinel elsewhere).
// ---------------------------------------------------------------------------

struct CommunityAssignment {
    std::string layer;
    std::vector<int> membership;                  // node index -> community id
    std::vector<std::vector<NodeIndex>> members;  // community id - 1 -> sorted nodes

    std::size_t community_count() const { return members.size(); }

    int community_of(NodeIndex v) const {
        if (v >= membership.size())
            throw MissingMembershipError("node index " + std::to_string(v) +
                                         " outside assignment for layer " + layer);
        return membership[v];
    }

    const std::vector<NodeIndex>& members_of(int community) const {
        if (community < 1 || static_cast<std::size_t>(community) > members.size())
            throw MissingMembershipError("community " + std::to_string(community) +
                                         " not present in layer " + layer);
        return members[static_cast<std::size_t>(community) - 1];
    }

    // Ids must form a contiguous 1..k range with no empty community.
    static CommunityAssignment from_membership(std::string layer,
                                               std::vector<int> membership) {
        CommunityAssignment a;
        a.layer = std::move(layer);
        int k = 0;
        for (int c : membership) {
            if (c < 1)
                throw InvalidParamsError("community ids must be >= 1 (layer " +
                                         a.layer + ")");
            k = std::max(k, c);
        }
        a.members.assign(static_cast<std::size_t>(k), {});
        for (NodeIndex v = 0; v < membership.size(); ++v)
            a.members[static_cast<std::size_t>(membership[v]) - 1].push_back(v);
        for (std::size_t c = 0; c < a.members.size(); ++c)
            if (a.members[c].empty())
                throw InvalidParamsError("community " + std::to_string(c + 1) +
                                         " is empty (ids must be contiguous)");
        a.membership = std::move(membership);
        return a;
    }
};

// ---------------------------------------------------------------------------
// Modularity
// ---------------------------------------------------------------------------

// Q = sum_c [ e_c/m - (d_c/2m)^2 ] over communities, where e_c counts edges
// internal to c and d_c sums member degrees.  An edgeless graph scores 0.
inline double newman_modularity(const Graph& g, const std::vector<int>& membership) {
    if (membership.size() != g.node_count())
        throw MissingMembershipError("membership covers " +
                                     std::to_string(membership.size()) + " of " +
                                     std::to_string(g.node_count()) + " nodes");
    int k = 0;
    for (int c : membership) {
        if (c < 1) throw MissingMembershipError("node without community id");
        k = std::max(k, c);
    }
    if (g.edge_count() == 0) return 0.0;

    std::vector<double> internal(static_cast<std::size_t>(k), 0.0);
    std::vector<double> degree_sum(static_cast<std::size_t>(k), 0.0);
    g.for_each_edge([&](NodeIndex u, NodeIndex v) {
        if (membership[u] == membership[v])
            internal[static_cast<std::size_t>(membership[u]) - 1] += 1.0;
    });
    for (NodeIndex v = 0; v < g.node_count(); ++v)
        degree_sum[static_cast<std::size_t>(membership[v]) - 1] +=
            static_cast<double>(g.degree(v));

    const double m = static_cast<double>(g.edge_count());
    double q = 0.0;
    for (std::size_t c = 0; c < internal.size(); ++c) {
        double frac = degree_sum[c] / (2.0 * m);
        q += internal[c] / m - frac * frac;
    }
    return q;
}

inline double newman_modularity(const Graph& g, const CommunityAssignment& a) {
    return newman_modularity(g, a.membership);
}

// ---------------------------------------------------------------------------
// Louvain
// ---------------------------------------------------------------------------

namespace louvain {

struct Trace {
    std::vector<double> level_modularity; // after each level's local-move phase
};

namespace detail {

// Weighted multigraph view used between aggregation levels.  A_ii keeps twice
// the collapsed internal weight so that strengths match the usual convention.
struct WorkGraph {
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj; // no self entries
    std::vector<double> self_w;
    std::vector<double> strength;
    double two_m = 0.0;

    std::size_t size() const { return adj.size(); }
};

inline WorkGraph from_graph(const Graph& g) {
    WorkGraph w;
    w.adj.resize(g.node_count());
    w.self_w.assign(g.node_count(), 0.0);
    w.strength.assign(g.node_count(), 0.0);
    for (NodeIndex u = 0; u < g.node_count(); ++u) {
        w.adj[u].reserve(g.degree(u));
        for (NodeIndex v : g.neighbors(u)) w.adj[u].emplace_back(v, 1.0);
        w.strength[u] = static_cast<double>(g.degree(u));
        w.two_m += w.strength[u];
    }
    return w;
}

inline double partition_modularity(const WorkGraph& g,
                                   const std::vector<std::uint32_t>& comm) {
    std::uint32_t k = 0;
    for (auto c : comm) k = std::max(k, c + 1);
    std::vector<double> internal(k, 0.0), total(k, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        internal[comm[i]] += g.self_w[i];
        total[comm[i]] += g.strength[i];
        for (auto [j, w] : g.adj[i])
            if (comm[j] == comm[i]) internal[comm[i]] += w;
    }
    double q = 0.0;
    for (std::uint32_t c = 0; c < k; ++c) {
        double frac = total[c] / g.two_m;
        q += internal[c] / g.two_m - frac * frac;
    }
    return q;
}

// One sweep-to-convergence of greedy local moves.  Nodes are visited in a
// seed-shuffled order; a node moves only for a strict modularity gain, and
// ties among candidate communities resolve to the smallest community label.
inline bool move_phase(const WorkGraph& g, std::vector<std::uint32_t>& comm,
                       std::mt19937_64& rng) {
    const std::size_t n = g.size();
    std::vector<double> sigma_tot(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) sigma_tot[comm[i]] += g.strength[i];

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<double> w_to(n, 0.0);
    std::vector<std::uint32_t> touched;
    const double eps = 1e-12;

    bool any = false;
    bool moved = true;
    while (moved) {
        moved = false;
        for (std::uint32_t i : order) {
            const std::uint32_t ci = comm[i];
            touched.clear();
            for (auto [j, w] : g.adj[i]) {
                std::uint32_t cj = comm[j];
                if (w_to[cj] == 0.0) touched.push_back(cj);
                w_to[cj] += w;
            }
            std::sort(touched.begin(), touched.end());

            sigma_tot[ci] -= g.strength[i];
            double best_gain = w_to[ci] - g.strength[i] * sigma_tot[ci] / g.two_m;
            std::uint32_t best = ci;
            for (std::uint32_t c : touched) {
                if (c == ci) continue;
                double gain = w_to[c] - g.strength[i] * sigma_tot[c] / g.two_m;
                if (gain > best_gain + eps) {
                    best_gain = gain;
                    best = c;
                }
            }
            sigma_tot[best] += g.strength[i];
            if (best != ci) {
                comm[i] = best;
                moved = true;
                any = true;
            }
            for (std::uint32_t c : touched) w_to[c] = 0.0;
        }
    }
    return any;
}

// Collapses communities into single nodes.  `node_to_new` maps each old work
// node to its community's new dense node id (community labels sorted, then
// numbered 0..C-1).
inline WorkGraph aggregate(const WorkGraph& g, const std::vector<std::uint32_t>& comm,
                           std::vector<std::uint32_t>& node_to_new) {
    std::vector<std::uint32_t> labels(comm);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    std::vector<std::uint32_t> dense(labels.empty() ? 0 : labels.back() + 1, 0);
    for (std::uint32_t i = 0; i < labels.size(); ++i) dense[labels[i]] = i;
    node_to_new.assign(comm.size(), 0);
    for (std::size_t v = 0; v < comm.size(); ++v) node_to_new[v] = dense[comm[v]];

    const std::size_t c_count = labels.size();
    WorkGraph out;
    out.adj.resize(c_count);
    out.self_w.assign(c_count, 0.0);
    out.strength.assign(c_count, 0.0);
    out.two_m = g.two_m;

    std::vector<std::map<std::uint32_t, double>> acc(c_count);
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::uint32_t ci = node_to_new[i];
        out.self_w[ci] += g.self_w[i];
        for (auto [j, w] : g.adj[i]) {
            std::uint32_t cj = node_to_new[j];
            if (cj == ci)
                out.self_w[ci] += w; // both arc directions accumulate => 2x weight
            else
                acc[ci][cj] += w;
        }
    }
    for (std::size_t c = 0; c < c_count; ++c) {
        out.adj[c].assign(acc[c].begin(), acc[c].end());
        double s = out.self_w[c];
        for (auto [j, w] : out.adj[c]) s += w;
        out.strength[c] = s;
    }
    return out;
}

} // namespace detail

// Greedy modularity optimisation (local moves + aggregation to a fixed
// point).  Deterministic for a given graph and seed.  Final communities are
// renumbered 1..k by decreasing size, ties by smallest member node index.
inline CommunityAssignment run(const Graph& g, std::uint64_t seed,
                               Trace* trace = nullptr) {
    CommunityAssignment out;
    out.layer = g.name();
    if (g.node_count() == 0) return out;

    std::vector<std::uint32_t> node_to_work(g.node_count());
    std::iota(node_to_work.begin(), node_to_work.end(), 0u);

    if (g.edge_count() > 0) {
        std::mt19937_64 rng(seed);
        detail::WorkGraph work = detail::from_graph(g);
        std::vector<std::uint32_t> comm(work.size());
        std::iota(comm.begin(), comm.end(), 0u);

        while (true) {
            bool improved = detail::move_phase(work, comm, rng);
            if (trace)
                trace->level_modularity.push_back(
                    detail::partition_modularity(work, comm));
            std::vector<std::uint32_t> node_to_new;
            detail::WorkGraph next = detail::aggregate(work, comm, node_to_new);
            for (auto& w : node_to_work) w = node_to_new[w];
            if (!improved || next.size() == work.size()) break;
            work = std::move(next);
            comm.resize(work.size());
            std::iota(comm.begin(), comm.end(), 0u);
        }
    }

    // Renumber 1..k by (size desc, smallest member asc).  Node labels are
    // sorted at construction, so the smallest index is the smallest label.
    std::uint32_t k = 0;
    for (auto c : node_to_work) k = std::max(k, c + 1);
    struct Info {
        std::uint32_t label;
        std::size_t size = 0;
        NodeIndex min_node = 0;
    };
    std::vector<Info> info(k);
    for (std::uint32_t c = 0; c < k; ++c) info[c].label = c;
    for (NodeIndex v = 0; v < node_to_work.size(); ++v) {
        Info& in = info[node_to_work[v]];
        if (in.size == 0) in.min_node = v;
        ++in.size;
    }
    std::sort(info.begin(), info.end(), [](const Info& a, const Info& b) {
        if (a.size != b.size) return a.size > b.size;
        return a.min_node < b.min_node;
    });
    std::vector<int> final_id(k, 0);
    for (std::size_t rank = 0; rank < info.size(); ++rank)
        final_id[info[rank].label] = static_cast<int>(rank) + 1;

    std::vector<int> membership(g.node_count());
    for (NodeIndex v = 0; v < g.node_count(); ++v)
        membership[v] = final_id[node_to_work[v]];
    return CommunityAssignment::from_membership(g.name(), std::move(membership));
}

} // namespace louvain

inline CommunityAssignment detect_communities(const Graph& g, std::uint64_t seed,
                                              louvain::Trace* trace = nullptr) {
    return louvain::run(g, seed, trace);
}

// ---------------------------------------------------------------------------
// Per-community statistics
// ---------------------------------------------------------------------------

struct CommunityStats {
    int community = 0;
    std::size_t size = 0;
    std::size_t internal_edges = 0;
    double density = 0.0; // 2e / (s(s-1)); singletons score 0
};

inline std::vector<CommunityStats> community_stats(const Graph& g,
                                                   const CommunityAssignment& a) {
    std::vector<CommunityStats> out(a.community_count());
    for (std::size_t c = 0; c < out.size(); ++c) {
        out[c].community = static_cast<int>(c) + 1;
        out[c].size = a.members[c].size();
    }
    g.for_each_edge([&](NodeIndex u, NodeIndex v) {
        if (a.membership[u] == a.membership[v])
            ++out[static_cast<std::size_t>(a.membership[u]) - 1].internal_edges;
    });
    for (auto& s : out) {
        if (s.size >= 2)
            s.density = 2.0 * static_cast<double>(s.internal_edges) /
                        (static_cast<double>(s.size) * static_cast<double>(s.size - 1));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Assignment round-trip (used by the CLI cache)
// ---------------------------------------------------------------------------

inline void write_assignment(std::ostream& out, const Graph& g,
                             const CommunityAssignment& a) {
    for (NodeIndex v = 0; v < g.node_count(); ++v)
        out << g.label(v) << "\t" << a.membership[v] << "\n";
}

inline void write_assignment(const std::filesystem::path& path, const Graph& g,
                             const CommunityAssignment& a) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot write assignment file: " + path.string());
    write_assignment(out, g, a);
}

inline CommunityAssignment read_assignment(const std::filesystem::path& path,
                                           const Graph& g) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open assignment file: " + path.string());
    std::vector<int> membership(g.node_count(), 0);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ss(line);
        std::string label;
        long long c = 0;
        if (!(ss >> label >> c) || c < 1)
            throw ParseError(path.string(), line_no, "expected \"node\tcommunity\"");
        auto v = g.find(label);
        if (!v)
            throw ParseError(path.string(), line_no,
                             "node \"" + label + "\" not in layer " + g.name());
        membership[*v] = static_cast<int>(c);
    }
    for (NodeIndex v = 0; v < g.node_count(); ++v)
        if (membership[v] == 0)
            throw MissingMembershipError("node \"" + g.label(v) +
                                         "\" missing from assignment file " +
                                         path.string());
    return CommunityAssignment::from_membership(g.name(), std::move(membership));
}

} // namespace hemln
