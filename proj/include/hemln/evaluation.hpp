#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hemln/community.hpp"
#include "hemln/composer.hpp"
#include "hemln/mln.hpp"

namespace hemln {

// ---------------------------------------------------------------------------
// Type-independent baseline: collapse the whole network into one simple graph
// and score its communities with plain modularity.
// ---------------------------------------------------------------------------

struct BaselineResult {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    double modularity = 0.0;
    CommunityAssignment assignment;
};

inline BaselineResult baseline_modularity(const MultilayerNetwork& mln,
                                          std::uint64_t seed) {
    BaselineResult r;
    Graph aggregate = collapse_type_independent(mln);
    r.nodes = aggregate.node_count();
    r.edges = aggregate.edge_count();
    r.assignment = detect_communities(aggregate, seed);
    r.modularity = r.assignment.membership.empty()
                       ? 0.0
                       : newman_modularity(aggregate, r.assignment);
    return r;
}

// ---------------------------------------------------------------------------
// Projected modularity of a composition result
//
// The tuples are projected onto the collapsed graph: all member nodes of all
// communities in one tuple form one block, nodes in no tuple become
// singletons, and a node claimed by several tuples goes to the tuple with the
// most couplings (ties: first tuple in result order).
// ---------------------------------------------------------------------------

inline double hemln_modularity(const MultilayerNetwork& mln,
                               const KCommunityResult& result,
                               const ArtifactStore& store) {
    Graph aggregate = collapse_type_independent(mln);
    const std::size_t n = aggregate.node_count();
    const std::size_t t_count = result.tuples.size();

    std::vector<int> claimed_by(n, -1); // tuple index or -1
    std::vector<std::size_t> tuple_weight(t_count, 0);
    for (std::size_t ti = 0; ti < t_count; ++ti)
        tuple_weight[ti] = result.tuples[ti].coupling_count();

    for (std::size_t ti = 0; ti < t_count; ++ti) {
        const auto& t = result.tuples[ti];
        for (std::size_t slot = 0; slot < t.community_ids.size(); ++slot) {
            if (t.community_ids[slot] == 0) continue;
            const std::string& layer = result.slot_layers[slot];
            const Graph& g = mln.layer(layer);
            const auto& art = get_artifacts(store, layer);
            for (NodeIndex v : art.assignment.members_of(t.community_ids[slot])) {
                auto agg = aggregate.find(g.label(v));
                if (!agg) continue; // cannot happen: collapse keeps every node
                int cur = claimed_by[*agg];
                if (cur < 0 ||
                    tuple_weight[static_cast<std::size_t>(cur)] < tuple_weight[ti])
                    claimed_by[*agg] = static_cast<int>(ti);
            }
        }
    }

    std::vector<int> membership(n, 0);
    int next_singleton = static_cast<int>(t_count) + 1;
    for (std::size_t v = 0; v < n; ++v) {
        if (claimed_by[v] >= 0)
            membership[v] = claimed_by[v] + 1;
        else
            membership[v] = next_singleton++;
    }
    return newman_modularity(aggregate, membership);
}

} // namespace hemln
