#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hemln/community.hpp"
#include "hemln/errors.hpp"
#include "hemln/graph.hpp"
#include "hemln/mln.hpp"

namespace hemln {

// ---------------------------------------------------------------------------
// Weight metrics
// ---------------------------------------------------------------------------

enum class WeightMetric { edge_count, density_fraction, hub_participation };

inline const char* to_string(WeightMetric m) {
    switch (m) {
        case WeightMetric::edge_count: return "we";
        case WeightMetric::density_fraction: return "wd";
        case WeightMetric::hub_participation: return "wh";
    }
    return "?";
}

inline WeightMetric parse_metric(std::string_view s) {
    if (s == "we") return WeightMetric::edge_count;
    if (s == "wd") return WeightMetric::density_fraction;
    if (s == "wh") return WeightMetric::hub_participation;
    throw InvalidParamsError("unknown weight metric \"" + std::string(s) +
                             "\" (expected we, wd or wh)");
}

// ---------------------------------------------------------------------------
// Hubs
// ---------------------------------------------------------------------------

struct HubSet {
    int community = 0;
    std::vector<NodeIndex> hubs; // sorted ascending
};

// A hub is a member whose intra-community degree is strictly greater than
// `mean_factor` times the community's mean intra-community degree.  When no
// member qualifies (e.g. all degrees equal), every member counts as a hub.
inline std::vector<HubSet> detect_hubs(const Graph& g, const CommunityAssignment& a,
                                       double mean_factor = 1.0) {
    std::vector<std::size_t> intra_deg(g.node_count(), 0);
    g.for_each_edge([&](NodeIndex u, NodeIndex v) {
        if (a.membership[u] == a.membership[v]) {
            ++intra_deg[u];
            ++intra_deg[v];
        }
    });
    std::vector<HubSet> out(a.community_count());
    for (std::size_t c = 0; c < a.community_count(); ++c) {
        out[c].community = static_cast<int>(c) + 1;
        const auto& members = a.members[c];
        double sum = 0.0;
        for (NodeIndex v : members) sum += static_cast<double>(intra_deg[v]);
        double threshold = mean_factor * sum / static_cast<double>(members.size());
        for (NodeIndex v : members)
            if (static_cast<double>(intra_deg[v]) > threshold)
                out[c].hubs.push_back(v);
        if (out[c].hubs.empty()) out[c].hubs = members;
    }
    return out;
}

// Everything the composition pipeline needs from one layer: computed once,
// reused by every pairing step that touches the layer.
struct LayerArtifacts {
    CommunityAssignment assignment;
    std::vector<CommunityStats> stats; // index = community id - 1
    std::vector<HubSet> hubs;          // index = community id - 1
};

inline LayerArtifacts make_layer_artifacts(const Graph& g, CommunityAssignment a,
                                           double hub_mean_factor = 1.0) {
    LayerArtifacts art;
    art.stats = community_stats(g, a);
    art.hubs = detect_hubs(g, a, hub_mean_factor);
    art.assignment = std::move(a);
    return art;
}

inline LayerArtifacts compute_layer_artifacts(const Graph& g, std::uint64_t seed,
                                              double hub_mean_factor = 1.0) {
    return make_layer_artifacts(g, detect_communities(g, seed), hub_mean_factor);
}

// ---------------------------------------------------------------------------
// Community bipartite graph (CBG)
//
// Meta nodes are the size->=2 communities of two layers; a meta edge joins two
// communities whose members are coupled by at least one inter-layer edge and
// carries the expanded list of those couplings plus a weight in (0,1].
// ---------------------------------------------------------------------------

struct MetaNode {
    std::string layer;
    int community = 0;
    std::size_t size = 0;
};

struct MetaEdge {
    std::size_t left = 0;  // index into left_nodes
    std::size_t right = 0; // index into right_nodes
    std::vector<std::pair<NodeIndex, NodeIndex>> expanded; // sorted couplings
    std::size_t raw_count = 0;                             // |expanded|
    double weight = 0.0;
};

struct CommunityBipartiteGraph {
    std::string left_layer;
    std::string right_layer;
    WeightMetric metric = WeightMetric::edge_count;
    std::vector<MetaNode> left_nodes;  // sorted by community id
    std::vector<MetaNode> right_nodes; // sorted by community id
    std::vector<MetaEdge> edges;       // sorted by (left, right), unique pairs

    std::optional<std::size_t> left_index_of(int community) const {
        return index_of(left_nodes, community);
    }
    std::optional<std::size_t> right_index_of(int community) const {
        return index_of(right_nodes, community);
    }

    // Assembles a CBG directly from weighted pairs; used by tests and by the
    // random instance generators.  raw counts default to the rounded weight.
    static CommunityBipartiteGraph
    for_testing(std::size_t n_left, std::size_t n_right,
                const std::vector<std::tuple<std::size_t, std::size_t, double>>& es,
                WeightMetric metric = WeightMetric::edge_count) {
        std::vector<std::tuple<std::size_t, std::size_t, double, std::size_t>> full;
        full.reserve(es.size());
        for (auto [l, r, w] : es)
            full.emplace_back(l, r, w,
                              static_cast<std::size_t>(std::llround(std::max(w, 0.0))));
        return for_testing_raw(n_left, n_right, full, metric);
    }

    static CommunityBipartiteGraph for_testing_raw(
        std::size_t n_left, std::size_t n_right,
        const std::vector<std::tuple<std::size_t, std::size_t, double, std::size_t>>& es,
        WeightMetric metric = WeightMetric::edge_count) {
        CommunityBipartiteGraph g;
        g.left_layer = "L";
        g.right_layer = "R";
        g.metric = metric;
        for (std::size_t i = 0; i < n_left; ++i)
            g.left_nodes.push_back({"L", static_cast<int>(i) + 1, 2});
        for (std::size_t i = 0; i < n_right; ++i)
            g.right_nodes.push_back({"R", static_cast<int>(i) + 1, 2});
        std::set<std::pair<std::size_t, std::size_t>> seen;
        for (auto [l, r, w, raw] : es) {
            if (l >= n_left || r >= n_right)
                throw InvalidParamsError("meta edge endpoint out of range");
            if (!seen.insert({l, r}).second)
                throw InvalidParamsError("duplicate meta edge");
            MetaEdge e;
            e.left = l;
            e.right = r;
            e.weight = w;
            e.raw_count = raw;
            g.edges.push_back(std::move(e));
        }
        std::sort(g.edges.begin(), g.edges.end(), [](const MetaEdge& a, const MetaEdge& b) {
            return std::make_pair(a.left, a.right) < std::make_pair(b.left, b.right);
        });
        return g;
    }

private:
    static std::optional<std::size_t> index_of(const std::vector<MetaNode>& nodes,
                                               int community) {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), community,
                                   [](const MetaNode& n, int c) { return n.community < c; });
        if (it == nodes.end() || it->community != community) return std::nullopt;
        return static_cast<std::size_t>(it - nodes.begin());
    }
};

// ---------------------------------------------------------------------------
// Weight passes.  Each operates on a CBG whose edges already carry expanded
// coupling lists, then prunes zero-weight edges so weights stay in (0,1].
// ---------------------------------------------------------------------------

namespace detail {

inline void prune_zero_weight(CommunityBipartiteGraph& g) {
    g.edges.erase(std::remove_if(g.edges.begin(), g.edges.end(),
                                 [](const MetaEdge& e) { return e.weight <= 0.0; }),
                  g.edges.end());
}

} // namespace detail

// weight = |x| / max |x| over the edges of this CBG; raw counts retained.
inline void weight_edge_count(CommunityBipartiteGraph& g) {
    std::size_t max_raw = 0;
    for (const auto& e : g.edges) max_raw = std::max(max_raw, e.raw_count);
    for (auto& e : g.edges)
        e.weight = max_raw == 0 ? 0.0
                                : static_cast<double>(e.raw_count) /
                                      static_cast<double>(max_raw);
    detail::prune_zero_weight(g);
}

// weight = density(left community) * |x| / (|left| * |right|) * density(right).
inline void weight_density_fraction(CommunityBipartiteGraph& g,
                                    const LayerArtifacts& left,
                                    const LayerArtifacts& right) {
    for (auto& e : g.edges) {
        const MetaNode& l = g.left_nodes[e.left];
        const MetaNode& r = g.right_nodes[e.right];
        double dl = left.stats[static_cast<std::size_t>(l.community) - 1].density;
        double dr = right.stats[static_cast<std::size_t>(r.community) - 1].density;
        double frac = static_cast<double>(e.raw_count) /
                      (static_cast<double>(l.size) * static_cast<double>(r.size));
        e.weight = dl * frac * dr;
    }
    detail::prune_zero_weight(g);
}

// weight = (|H_lr| / |H_l|) * |x| / (|left| * |right|) * (|H_rl| / |H_r|),
// where H_l are the left community's hubs and H_lr those of them incident to
// this meta edge (symmetrically on the right).
inline void weight_hub_participation(CommunityBipartiteGraph& g,
                                     const LayerArtifacts& left,
                                     const LayerArtifacts& right) {
    std::map<int, std::unordered_set<NodeIndex>> left_hubs, right_hubs;
    for (const auto& n : g.left_nodes) {
        const auto& h = left.hubs[static_cast<std::size_t>(n.community) - 1].hubs;
        left_hubs[n.community] = {h.begin(), h.end()};
    }
    for (const auto& n : g.right_nodes) {
        const auto& h = right.hubs[static_cast<std::size_t>(n.community) - 1].hubs;
        right_hubs[n.community] = {h.begin(), h.end()};
    }
    for (auto& e : g.edges) {
        const MetaNode& l = g.left_nodes[e.left];
        const MetaNode& r = g.right_nodes[e.right];
        const auto& hl = left_hubs[l.community];
        const auto& hr = right_hubs[r.community];
        std::unordered_set<NodeIndex> l_touched, r_touched;
        for (auto [u, v] : e.expanded) {
            if (hl.count(u)) l_touched.insert(u);
            if (hr.count(v)) r_touched.insert(v);
        }
        double frac = static_cast<double>(e.raw_count) /
                      (static_cast<double>(l.size) * static_cast<double>(r.size));
        e.weight = (static_cast<double>(l_touched.size()) /
                    static_cast<double>(hl.size())) *
                   frac *
                   (static_cast<double>(r_touched.size()) /
                    static_cast<double>(hr.size()));
    }
    detail::prune_zero_weight(g);
}

// ---------------------------------------------------------------------------
// CBG construction
// ---------------------------------------------------------------------------

// Builds the community bipartite graph between two layers.  Only communities
// of size >= 2 become meta nodes; `left_allowed` / `right_allowed` (when
// non-null) further restrict the admitted community ids on each side.
inline CommunityBipartiteGraph
build_cbg_restricted(const MultilayerNetwork& mln, const LayerArtifacts& left,
                     const LayerArtifacts& right, WeightMetric metric,
                     const std::set<int>* left_allowed,
                     const std::set<int>* right_allowed) {
    CommunityBipartiteGraph g;
    g.left_layer = left.assignment.layer;
    g.right_layer = right.assignment.layer;
    g.metric = metric;

    auto admit = [](const LayerArtifacts& art, const std::set<int>* allowed, int c) {
        if (art.assignment.members[static_cast<std::size_t>(c) - 1].size() < 2)
            return false;
        return !allowed || allowed->count(c) > 0;
    };

    std::map<int, std::size_t> left_idx, right_idx;
    for (std::size_t c = 0; c < left.assignment.community_count(); ++c) {
        int id = static_cast<int>(c) + 1;
        if (!admit(left, left_allowed, id)) continue;
        left_idx[id] = g.left_nodes.size();
        g.left_nodes.push_back({g.left_layer, id, left.assignment.members[c].size()});
    }
    for (std::size_t c = 0; c < right.assignment.community_count(); ++c) {
        int id = static_cast<int>(c) + 1;
        if (!admit(right, right_allowed, id)) continue;
        right_idx[id] = g.right_nodes.size();
        g.right_nodes.push_back({g.right_layer, id, right.assignment.members[c].size()});
    }

    std::map<std::pair<std::size_t, std::size_t>,
             std::vector<std::pair<NodeIndex, NodeIndex>>> groups;
    for (auto [u, v] : mln.links_between(g.left_layer, g.right_layer)) {
        int cu = left.assignment.membership[u];
        int cv = right.assignment.membership[v];
        auto li = left_idx.find(cu);
        if (li == left_idx.end()) continue;
        auto ri = right_idx.find(cv);
        if (ri == right_idx.end()) continue;
        groups[{li->second, ri->second}].emplace_back(u, v);
    }
    for (auto& [key, expanded] : groups) {
        MetaEdge e;
        e.left = key.first;
        e.right = key.second;
        e.expanded = std::move(expanded); // already sorted: links_between is sorted
        e.raw_count = e.expanded.size();
        g.edges.push_back(std::move(e));
    }

    switch (metric) {
        case WeightMetric::edge_count: weight_edge_count(g); break;
        case WeightMetric::density_fraction: weight_density_fraction(g, left, right); break;
        case WeightMetric::hub_participation: weight_hub_participation(g, left, right); break;
    }
    return g;
}

inline CommunityBipartiteGraph build_cbg(const MultilayerNetwork& mln,
                                         const LayerArtifacts& left,
                                         const LayerArtifacts& right,
                                         WeightMetric metric) {
    return build_cbg_restricted(mln, left, right, metric, nullptr, nullptr);
}

// Tab-separated dump: header then one line per meta edge.
inline void write_cbg(std::ostream& out, const CommunityBipartiteGraph& g) {
    out << "# " << g.left_layer << "\t" << g.right_layer << "\tmetric="
        << to_string(g.metric) << "\tleft=" << g.left_nodes.size()
        << "\tright=" << g.right_nodes.size() << "\n";
    char buf[64];
    for (const auto& e : g.edges) {
        std::snprintf(buf, sizeof(buf), "%.9g", e.weight);
        out << g.left_nodes[e.left].community << "\t"
            << g.right_nodes[e.right].community << "\t" << e.raw_count << "\t"
            << buf << "\n";
    }
}

} // namespace hemln
