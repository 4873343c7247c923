#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <future>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hemln/community.hpp"
#include "hemln/errors.hpp"
#include "hemln/expression.hpp"
#include "hemln/meta_graph.hpp"
#include "hemln/mln.hpp"
#include "hemln/pairing.hpp"

namespace hemln {

// ---------------------------------------------------------------------------
// k-community tuples
//
// A tuple holds one community id per processed layer ("slot") plus one
// coupling set per executed step.  Id 0 means the tuple has no community in
// that layer; an empty coupling set means the step found none.  A tuple is
// total when every slot and every step is filled, partial otherwise.
// ---------------------------------------------------------------------------

using CouplingSet = std::vector<std::pair<NodeIndex, NodeIndex>>;

struct KCommunityTuple {
    std::vector<int> community_ids;     // aligned with KCommunityResult::slot_layers
    std::vector<CouplingSet> edge_sets; // aligned with executed steps

    bool is_total() const {
        for (int c : community_ids)
            if (c == 0) return false;
        for (const auto& x : edge_sets)
            if (x.empty()) return false;
        return !community_ids.empty();
    }

    std::size_t coupling_count() const {
        std::size_t n = 0;
        for (const auto& x : edge_sets) n += x.size();
        return n;
    }

    friend bool operator==(const KCommunityTuple& a, const KCommunityTuple& b) {
        return a.community_ids == b.community_ids && a.edge_sets == b.edge_sets;
    }
    friend bool operator<(const KCommunityTuple& a, const KCommunityTuple& b) {
        if (a.community_ids != b.community_ids) return a.community_ids < b.community_ids;
        return a.edge_sets < b.edge_sets;
    }
};

struct StepSummary {
    std::size_t index = 0; // 1-based step number
    std::string left, right;
    StepCase step_case = StepCase::initial;
    std::size_t cbg_left = 0, cbg_right = 0, cbg_edges = 0;
    std::size_t pair_count = 0;
    double selected_weight = 0.0;   // sum of selected normalised weights
    std::size_t selected_raw = 0;   // sum of selected coupling counts
    std::size_t consistent = 0, no_match = 0, inconsistent = 0;
    double seconds = 0.0;
};

struct KCommunityResult {
    KCommunityExpression expression;
    WeightMetric metric = WeightMetric::edge_count;
    PairingAlgorithm algorithm = PairingAlgorithm::mwm;
    std::vector<std::string> slot_layers; // processing order, one per distinct layer
    std::vector<KCommunityTuple> tuples;  // sorted by content
    std::vector<StepSummary> steps;
    std::vector<std::string> warnings;

    std::size_t total_count() const {
        std::size_t n = 0;
        for (const auto& t : tuples) n += t.is_total();
        return n;
    }
    std::size_t partial_count() const { return tuples.size() - total_count(); }
};

// ---------------------------------------------------------------------------
// One-time per-layer artifacts
// ---------------------------------------------------------------------------

using ArtifactStore = std::map<std::string, LayerArtifacts, std::less<>>;

inline const LayerArtifacts& get_artifacts(const ArtifactStore& store,
                                           const std::string& layer) {
    auto it = store.find(layer);
    if (it == store.end())
        throw MissingMembershipError("no community artifacts for layer " + layer);
    return it->second;
}

// Runs community detection (same seed per layer) plus stats and hub passes
// for every layer.  `timings` (optional) receives per-layer seconds.
inline ArtifactStore compute_artifacts(const MultilayerNetwork& mln,
                                       std::uint64_t seed, unsigned threads = 1,
                                       double hub_mean_factor = 1.0,
                                       std::map<std::string, double>* timings = nullptr) {
    ArtifactStore store;
    auto one = [&](std::size_t i) {
        auto t0 = std::chrono::steady_clock::now();
        LayerArtifacts art =
            compute_layer_artifacts(mln.layer(i), seed, hub_mean_factor);
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                        .count();
        return std::make_pair(std::move(art), dt);
    };
    if (threads <= 1) {
        for (std::size_t i = 0; i < mln.layer_count(); ++i) {
            auto [art, dt] = one(i);
            if (timings) (*timings)[mln.layer(i).name()] = dt;
            store[mln.layer(i).name()] = std::move(art);
        }
    } else {
        std::vector<std::future<std::pair<LayerArtifacts, double>>> futs;
        futs.reserve(mln.layer_count());
        for (std::size_t i = 0; i < mln.layer_count(); ++i)
            futs.push_back(std::async(std::launch::async, one, i));
        for (std::size_t i = 0; i < mln.layer_count(); ++i) {
            auto [art, dt] = futs[i].get();
            if (timings) (*timings)[mln.layer(i).name()] = dt;
            store[mln.layer(i).name()] = std::move(art);
        }
    }
    return store;
}

// ---------------------------------------------------------------------------
// Composition engine
// ---------------------------------------------------------------------------

namespace detail {

inline void sort_dedupe(std::vector<KCommunityTuple>& ts) {
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
}

inline std::set<int> ids_in_slot(const std::vector<KCommunityTuple>& ts,
                                 std::size_t slot) {
    std::set<int> out;
    for (const auto& t : ts)
        if (t.community_ids[slot] != 0) out.insert(t.community_ids[slot]);
    return out;
}

} // namespace detail

// Evaluates the expression left to right against precomputed layer artifacts.
// Every step builds a CBG restricted to the communities still represented in
// the running result, runs the pairing algorithm, then rewrites the tuples.
inline KCommunityResult evaluate_k_community(const MultilayerNetwork& mln,
                                             const KCommunityExpression& expr,
                                             WeightMetric metric,
                                             PairingAlgorithm algo,
                                             const ArtifactStore& store) {
    KCommunityResult res;
    res.expression = expr;
    res.metric = metric;
    res.algorithm = algo;
    if (expr.layer_sequence.empty()) return res;

    if (expr.steps.empty()) {
        // Single-layer expression: one 1-slot tuple per size >= 2 community.
        const auto& art = get_artifacts(store, expr.layer_sequence[0]);
        res.slot_layers.push_back(expr.layer_sequence[0]);
        for (std::size_t c = 0; c < art.assignment.community_count(); ++c)
            if (art.assignment.members[c].size() >= 2)
                res.tuples.push_back({{static_cast<int>(c) + 1}, {}});
        return res;
    }

    auto cases = classify_steps(expr);
    std::map<std::string, std::size_t> slot_of;

    for (std::size_t s = 0; s < expr.steps.size(); ++s) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::string& left = expr.steps[s].left;
        const std::string& right = expr.steps[s].right;
        const auto& left_art = get_artifacts(store, left);
        const auto& right_art = get_artifacts(store, right);

        StepSummary sum;
        sum.index = s + 1;
        sum.left = left;
        sum.right = right;
        sum.step_case = cases[s];

        CommunityBipartiteGraph cbg;
        if (s == 0) {
            cbg = build_cbg(mln, left_art, right_art, metric);
        } else {
            std::set<int> left_allowed =
                detail::ids_in_slot(res.tuples, slot_of.at(left));
            std::set<int> right_allowed;
            const std::set<int>* right_filter = nullptr;
            if (cases[s] == StepCase::both_processed) {
                right_allowed = detail::ids_in_slot(res.tuples, slot_of.at(right));
                right_filter = &right_allowed;
            }
            cbg = build_cbg_restricted(mln, left_art, right_art, metric,
                                       &left_allowed, right_filter);
        }
        sum.cbg_left = cbg.left_nodes.size();
        sum.cbg_right = cbg.right_nodes.size();
        sum.cbg_edges = cbg.edges.size();
        if (cbg.edges.empty())
            res.warnings.push_back("EmptyCBG: step " + std::to_string(s + 1) +
                                   " (" + left + "," + right + ") has no meta edges");

        Pairing pairing = run_pairing(cbg, algo);
        sum.pair_count = pairing.size();
        sum.selected_weight = pairing.total_weight;
        sum.selected_raw = pairing.total_raw;

        // Selected pairs as community-id lookups.
        std::map<int, std::vector<std::pair<int, std::size_t>>> by_left;
        std::set<std::pair<int, int>> pair_set;
        std::map<std::pair<int, int>, std::size_t> edge_of;
        for (std::size_t ei : pairing.selected) {
            const MetaEdge& e = cbg.edges[ei];
            int cl = cbg.left_nodes[e.left].community;
            int cr = cbg.right_nodes[e.right].community;
            by_left[cl].emplace_back(cr, ei);
            pair_set.insert({cl, cr});
            edge_of[{cl, cr}] = ei;
        }

        if (s == 0) {
            res.slot_layers.push_back(left);
            res.slot_layers.push_back(right);
            slot_of[left] = 0;
            slot_of[right] = 1;
            for (std::size_t ei : pairing.selected) {
                const MetaEdge& e = cbg.edges[ei];
                KCommunityTuple t;
                t.community_ids = {cbg.left_nodes[e.left].community,
                                   cbg.right_nodes[e.right].community};
                t.edge_sets = {e.expanded};
                res.tuples.push_back(std::move(t));
            }
            sum.consistent = pairing.size();
        } else if (cases[s] == StepCase::new_layer) {
            std::vector<KCommunityTuple> next;
            for (const auto& t : res.tuples) {
                int cl = t.community_ids[slot_of.at(left)];
                auto it = cl == 0 ? by_left.end() : by_left.find(cl);
                if (it == by_left.end() || it->second.empty()) {
                    KCommunityTuple nt = t;
                    nt.community_ids.push_back(0);
                    nt.edge_sets.push_back({});
                    next.push_back(std::move(nt));
                    ++sum.no_match;
                } else {
                    for (auto [cr, ei] : it->second) {
                        KCommunityTuple nt = t;
                        nt.community_ids.push_back(cr);
                        nt.edge_sets.push_back(cbg.edges[ei].expanded);
                        next.push_back(std::move(nt));
                        ++sum.consistent;
                    }
                }
            }
            slot_of[right] = res.slot_layers.size();
            res.slot_layers.push_back(right);
            res.tuples = std::move(next);
        } else { // both layers already processed: update in place
            std::vector<KCommunityTuple> next;
            for (const auto& t : res.tuples) {
                int cl = t.community_ids[slot_of.at(left)];
                int cr = t.community_ids[slot_of.at(right)];
                KCommunityTuple nt = t;
                if (cl != 0 && cr != 0 && pair_set.count({cl, cr})) {
                    nt.edge_sets.push_back(cbg.edges[edge_of.at({cl, cr})].expanded);
                    ++sum.consistent;
                } else {
                    nt.edge_sets.push_back({});
                    if (cl != 0 && cr != 0 && by_left.count(cl))
                        ++sum.inconsistent;
                    else
                        ++sum.no_match;
                }
                next.push_back(std::move(nt));
            }
            res.tuples = std::move(next);
        }

        detail::sort_dedupe(res.tuples);
        sum.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        res.steps.push_back(std::move(sum));
    }
    return res;
}

inline KCommunityResult evaluate_k_community(const MultilayerNetwork& mln,
                                             const KCommunityExpression& expr,
                                             WeightMetric metric,
                                             PairingAlgorithm algo,
                                             std::uint64_t seed,
                                             unsigned threads = 1,
                                             double hub_mean_factor = 1.0) {
    ArtifactStore store = compute_artifacts(mln, seed, threads, hub_mean_factor);
    return evaluate_k_community(mln, expr, metric, algo, store);
}

inline std::pair<std::vector<KCommunityTuple>, std::vector<KCommunityTuple>>
classify_tuples(const KCommunityResult& r) {
    std::pair<std::vector<KCommunityTuple>, std::vector<KCommunityTuple>> out;
    for (const auto& t : r.tuples)
        (t.is_total() ? out.first : out.second).push_back(t);
    return out;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

// Tab-separated tuple table.  Columns: one community id per slot layer, the
// total/partial flag, then the coupling count of each step.
inline void write_tuple_table(std::ostream& out, const KCommunityResult& r) {
    out << "# expression: " << r.expression.unparse() << "\n";
    out << "# metric=" << to_string(r.metric) << " algorithm="
        << to_string(r.algorithm) << "\n";
    out << "#";
    for (const auto& l : r.slot_layers) out << " " << l;
    out << " flag";
    for (const auto& s : r.steps)
        out << " x" << s.index << ":" << s.left << "-" << s.right;
    out << "\n";
    for (const auto& t : r.tuples) {
        for (std::size_t i = 0; i < t.community_ids.size(); ++i)
            out << (i ? "\t" : "") << t.community_ids[i];
        out << "\t" << (t.is_total() ? "total" : "partial");
        for (const auto& x : t.edge_sets) out << "\t" << x.size();
        out << "\n";
    }
}

// Companion dump of the expanded couplings: one line per coupling with the
// 1-based tuple row, 1-based step, and the two node labels.
inline void write_tuple_edges(std::ostream& out, const KCommunityResult& r,
                              const MultilayerNetwork& mln) {
    out << "# tuple\tstep\t" << "left_node\tright_node\n";
    for (std::size_t ti = 0; ti < r.tuples.size(); ++ti) {
        const auto& t = r.tuples[ti];
        for (std::size_t s = 0; s < t.edge_sets.size(); ++s) {
            const Graph& gl = mln.layer(r.steps[s].left);
            const Graph& gr = mln.layer(r.steps[s].right);
            for (auto [u, v] : t.edge_sets[s])
                out << (ti + 1) << "\t" << (s + 1) << "\t" << gl.label(u) << "\t"
                    << gr.label(v) << "\n";
        }
    }
}

} // namespace hemln
