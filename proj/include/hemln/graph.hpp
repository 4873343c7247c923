#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hemln/errors.hpp"

namespace hemln {

using NodeIndex = std::uint32_t;

// Simple undirected graph with string node labels.
//
// Construction is canonicalising: labels are sorted so that node indices are
// independent of insertion order, adjacency lists are sorted, and duplicate
// edges / self-loops are dropped (but counted).  Two graphs built from the
// same node and edge sets are therefore identical regardless of input order.
class Graph {
public:
    Graph() = default;

    const std::string& name() const { return name_; }
    std::size_t node_count() const { return labels_.size(); }
    std::size_t edge_count() const { return edge_count_; }

    const std::string& label(NodeIndex v) const { return labels_[v]; }

    std::optional<NodeIndex> find(std::string_view label) const {
        auto it = index_.find(std::string(label));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    const std::vector<NodeIndex>& neighbors(NodeIndex v) const { return adj_[v]; }
    std::size_t degree(NodeIndex v) const { return adj_[v].size(); }

    bool has_edge(NodeIndex u, NodeIndex v) const {
        const auto& a = adj_[u];
        return std::binary_search(a.begin(), a.end(), v);
    }

    // Visits each undirected edge once as (u, v) with u < v, ascending.
    template <class F>
    void for_each_edge(F&& f) const {
        for (NodeIndex u = 0; u < adj_.size(); ++u)
            for (NodeIndex v : adj_[u])
                if (u < v) f(u, v);
    }

    std::size_t dropped_self_loops() const { return dropped_self_loops_; }
    std::size_t dropped_duplicates() const { return dropped_duplicates_; }

private:
    friend class GraphBuilder;

    std::string name_;
    std::vector<std::string> labels_;                       // sorted ascending
    std::unordered_map<std::string, NodeIndex> index_;
    std::vector<std::vector<NodeIndex>> adj_;               // each sorted
    std::size_t edge_count_ = 0;
    std::size_t dropped_self_loops_ = 0;
    std::size_t dropped_duplicates_ = 0;
};

// Accumulates nodes and edges, then produces a canonical Graph.  Endpoints of
// edges are added as nodes implicitly; isolated nodes can be added explicitly.
class GraphBuilder {
public:
    explicit GraphBuilder(std::string name) : name_(std::move(name)) {}

    void add_node(std::string label) { labels_.push_back(std::move(label)); }

    void add_edge(std::string a, std::string b) {
        edges_.emplace_back(std::move(a), std::move(b));
    }

    Graph build() {
        Graph g;
        g.name_ = name_;

        for (const auto& [a, b] : edges_) {
            labels_.push_back(a);
            labels_.push_back(b);
        }
        std::sort(labels_.begin(), labels_.end());
        labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
        g.labels_ = labels_;
        g.index_.reserve(g.labels_.size());
        for (NodeIndex i = 0; i < g.labels_.size(); ++i)
            g.index_.emplace(g.labels_[i], i);

        g.adj_.assign(g.labels_.size(), {});
        std::vector<std::pair<NodeIndex, NodeIndex>> es;
        es.reserve(edges_.size());
        for (const auto& [a, b] : edges_) {
            NodeIndex u = g.index_.at(a);
            NodeIndex v = g.index_.at(b);
            if (u == v) {
                ++g.dropped_self_loops_;
                continue;
            }
            if (u > v) std::swap(u, v);
            es.emplace_back(u, v);
        }
        std::sort(es.begin(), es.end());
        std::size_t unique_count = 0;
        for (std::size_t i = 0; i < es.size(); ++i) {
            if (i > 0 && es[i] == es[i - 1]) {
                ++g.dropped_duplicates_;
                continue;
            }
            ++unique_count;
            g.adj_[es[i].first].push_back(es[i].second);
            g.adj_[es[i].second].push_back(es[i].first);
        }
        g.edge_count_ = unique_count;
        for (auto& a : g.adj_) std::sort(a.begin(), a.end());
        return g;
    }

private:
    std::string name_;
    std::vector<std::string> labels_;
    std::vector<std::pair<std::string, std::string>> edges_;
};

} // namespace hemln
