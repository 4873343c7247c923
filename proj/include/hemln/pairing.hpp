#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

#include "hemln/errors.hpp"
#include "hemln/meta_graph.hpp"

namespace hemln {

enum class PairingAlgorithm { mwm, mwpm, mwrm, mwmt };

inline const char* to_string(PairingAlgorithm a) {
    switch (a) {
        case PairingAlgorithm::mwm: return "mwm";
        case PairingAlgorithm::mwpm: return "mwpm";
        case PairingAlgorithm::mwrm: return "mwrm";
        case PairingAlgorithm::mwmt: return "mwmt";
    }
    return "?";
}

inline PairingAlgorithm parse_algorithm(std::string_view s) {
    if (s == "mwm") return PairingAlgorithm::mwm;
    if (s == "mwpm") return PairingAlgorithm::mwpm;
    if (s == "mwrm") return PairingAlgorithm::mwrm;
    if (s == "mwmt") return PairingAlgorithm::mwmt;
    throw InvalidParamsError("unknown pairing algorithm \"" + std::string(s) +
                             "\" (expected mwm, mwpm, mwrm or mwmt)");
}

// A selection of meta edges.  MWM and MWPM are matchings; MWRM and MWMT may
// share meta nodes between selected edges.
struct Pairing {
    PairingAlgorithm algorithm = PairingAlgorithm::mwm;
    std::vector<std::size_t> selected; // indices into cbg.edges, ascending
    double total_weight = 0.0;
    std::size_t total_raw = 0;

    std::size_t size() const { return selected.size(); }
};

namespace detail {

// Orientation-free working copy of a CBG.  The canonical view makes every
// pairing algorithm symmetric: pairing(G) and pairing(transpose(G)) select
// the same meta edges.
struct ViewEdge {
    std::size_t l = 0, r = 0;
    double w = 0.0;
    std::size_t raw = 0;
    std::size_t orig = 0; // index into cbg.edges
};

struct BipartiteView {
    std::size_t nl = 0, nr = 0;
    std::vector<ViewEdge> edges; // sorted by (l, r)
    bool swapped = false;
};

inline BipartiteView make_view(const CommunityBipartiteGraph& g, bool swapped) {
    BipartiteView v;
    v.swapped = swapped;
    v.nl = swapped ? g.right_nodes.size() : g.left_nodes.size();
    v.nr = swapped ? g.left_nodes.size() : g.right_nodes.size();
    v.edges.reserve(g.edges.size());
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const MetaEdge& e = g.edges[i];
        ViewEdge ve;
        ve.l = swapped ? e.right : e.left;
        ve.r = swapped ? e.left : e.right;
        ve.w = e.weight;
        ve.raw = e.raw_count;
        ve.orig = i;
        v.edges.push_back(ve);
    }
    std::sort(v.edges.begin(), v.edges.end(), [](const ViewEdge& a, const ViewEdge& b) {
        return std::make_pair(a.l, a.r) < std::make_pair(b.l, b.r);
    });
    return v;
}

inline BipartiteView canonical_view(const CommunityBipartiteGraph& g) {
    if (g.left_nodes.size() != g.right_nodes.size())
        return make_view(g, g.right_nodes.size() < g.left_nodes.size());
    BipartiteView a = make_view(g, false);
    BipartiteView b = make_view(g, true);
    for (std::size_t i = 0; i < a.edges.size(); ++i) {
        const ViewEdge& x = a.edges[i];
        const ViewEdge& y = b.edges[i];
        auto kx = std::make_tuple(x.l, x.r, x.w, x.raw);
        auto ky = std::make_tuple(y.l, y.r, y.w, y.raw);
        if (kx < ky) return a;
        if (ky < kx) return b;
    }
    return a; // transpose-symmetric: either orientation gives the same edges
}

// Jonker-Volgenant style shortest augmenting path solver for the square
// min-cost assignment problem.  Returns for each column the assigned row.
inline std::vector<std::size_t> jv_min_assignment(const std::vector<double>& cost,
                                                  std::size_t n) {
    const double INF = std::numeric_limits<double>::infinity();
    // 1-based with a virtual column 0.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, INF);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            std::size_t i0 = p[j0], j1 = 0;
            double delta = INF;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> row_of_col(n, 0);
    for (std::size_t j = 1; j <= n; ++j) row_of_col[j - 1] = p[j] - 1;
    return row_of_col;
}

// Solves max-weight assignment over the view.  With `cardinality_first` every
// real edge gets a uniform bonus large enough that selecting one more edge
// always beats any weight difference.  Returns selected view-edge indices.
inline std::vector<std::size_t> solve_assignment(const BipartiteView& view,
                                                 bool cardinality_first) {
    std::vector<std::size_t> out;
    if (view.edges.empty()) return out;
    const std::size_t n = std::max(view.nl, view.nr);
    double bonus = 0.0;
    if (cardinality_first) {
        for (const auto& e : view.edges) bonus += e.w;
        bonus += 1.0;
    }
    std::vector<double> cost(n * n, 0.0);
    for (const auto& e : view.edges) cost[e.l * n + e.r] = -(e.w + bonus);

    std::vector<std::size_t> row_of_col = jv_min_assignment(cost, n);
    std::vector<std::size_t> col_of_row(n, n);
    for (std::size_t j = 0; j < n; ++j) col_of_row[row_of_col[j]] = j;

    for (std::size_t i = 0; i < view.edges.size(); ++i) {
        const ViewEdge& e = view.edges[i];
        if (col_of_row[e.l] != e.r) continue;
        if (!cardinality_first && e.w <= 0.0) continue; // padding-equivalent pick
        out.push_back(i);
    }
    return out;
}

struct IncidenceIndex {
    std::vector<std::vector<std::size_t>> by_left, by_right;

    explicit IncidenceIndex(const BipartiteView& v)
        : by_left(v.nl), by_right(v.nr) {
        for (std::size_t i = 0; i < v.edges.size(); ++i) {
            by_left[v.edges[i].l].push_back(i);
            by_right[v.edges[i].r].push_back(i);
        }
    }
};

inline Pairing finish(const CommunityBipartiteGraph& g, const BipartiteView& view,
                      std::vector<std::size_t> view_ids, PairingAlgorithm algo) {
    Pairing p;
    p.algorithm = algo;
    p.selected.reserve(view_ids.size());
    for (std::size_t id : view_ids) p.selected.push_back(view.edges[id].orig);
    std::sort(p.selected.begin(), p.selected.end());
    for (std::size_t id : p.selected) {
        p.total_weight += g.edges[id].weight;
        p.total_raw += g.edges[id].raw_count;
    }
    return p;
}

inline bool weights_tie(const CommunityBipartiteGraph& g, const ViewEdge& a,
                        const ViewEdge& b) {
    if (g.metric == WeightMetric::edge_count) return a.raw == b.raw;
    double scale = std::max(std::abs(a.w), std::abs(b.w));
    return std::abs(a.w - b.w) <= 1e-9 * scale;
}

} // namespace detail

// Maximum-weight matching over the CBG.
inline Pairing max_weight_pairing(const CommunityBipartiteGraph& g) {
    auto view = detail::canonical_view(g);
    return detail::finish(g, view, detail::solve_assignment(view, false),
                          PairingAlgorithm::mwm);
}

// Maximum-cardinality matching; weight breaks ties among those.
inline Pairing max_participation_pairing(const CommunityBipartiteGraph& g) {
    auto view = detail::canonical_view(g);
    return detail::finish(g, view, detail::solve_assignment(view, true),
                          PairingAlgorithm::mwpm);
}

// Starts from the max-weight matching; each matched edge, visited in
// ascending weight order, is replaced (once) by the heaviest strictly heavier
// unselected edge incident on either of its endpoints.  The result keeps the
// matching's cardinality but may share meta nodes.
inline Pairing replacement_pairing(const CommunityBipartiteGraph& g) {
    auto view = detail::canonical_view(g);
    auto base = detail::solve_assignment(view, false);
    detail::IncidenceIndex inc(view);

    std::set<std::size_t> selected(base.begin(), base.end());
    std::vector<std::size_t> order(base);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ea = view.edges[a];
        const auto& eb = view.edges[b];
        return std::make_tuple(ea.w, ea.l, ea.r) < std::make_tuple(eb.w, eb.l, eb.r);
    });

    for (std::size_t cur : order) {
        const auto& e = view.edges[cur];
        std::size_t best = view.edges.size();
        auto consider = [&](std::size_t cand) {
            if (selected.count(cand)) return;
            const auto& c = view.edges[cand];
            if (!(c.w > e.w)) return;
            if (best == view.edges.size()) {
                best = cand;
                return;
            }
            const auto& b = view.edges[best];
            if (std::make_tuple(-c.w, c.l, c.r) < std::make_tuple(-b.w, b.l, b.r))
                best = cand;
        };
        for (std::size_t cand : inc.by_left[e.l]) consider(cand);
        for (std::size_t cand : inc.by_right[e.r]) consider(cand);
        if (best != view.edges.size()) {
            selected.erase(cur);
            selected.insert(best);
        }
    }
    return detail::finish(g, view,
                          std::vector<std::size_t>(selected.begin(), selected.end()),
                          PairingAlgorithm::mwrm);
}

// Max-weight matching plus every unselected edge whose weight ties a matched
// edge incident on the same meta node.  Ties compare raw coupling counts
// exactly under the edge-count metric and within 1e-9 relative otherwise.
inline Pairing tie_expansion_pairing(const CommunityBipartiteGraph& g) {
    auto view = detail::canonical_view(g);
    auto base = detail::solve_assignment(view, false);
    detail::IncidenceIndex inc(view);

    std::set<std::size_t> selected(base.begin(), base.end());
    std::sort(base.begin(), base.end()); // anchor scan in (l, r) order
    for (std::size_t anchor : base) {
        const auto& e = view.edges[anchor];
        auto consider = [&](std::size_t cand) {
            if (selected.count(cand)) return;
            if (detail::weights_tie(g, view.edges[cand], e)) selected.insert(cand);
        };
        for (std::size_t cand : inc.by_left[e.l]) consider(cand);
        for (std::size_t cand : inc.by_right[e.r]) consider(cand);
    }
    return detail::finish(g, view,
                          std::vector<std::size_t>(selected.begin(), selected.end()),
                          PairingAlgorithm::mwmt);
}

inline Pairing run_pairing(const CommunityBipartiteGraph& g, PairingAlgorithm a) {
    switch (a) {
        case PairingAlgorithm::mwm: return max_weight_pairing(g);
        case PairingAlgorithm::mwpm: return max_participation_pairing(g);
        case PairingAlgorithm::mwrm: return replacement_pairing(g);
        case PairingAlgorithm::mwmt: return tie_expansion_pairing(g);
    }
    throw InvalidParamsError("unhandled pairing algorithm");
}

// ---------------------------------------------------------------------------
// Exhaustive reference solver (small instances only)
// ---------------------------------------------------------------------------

enum class OracleMode { max_weight, max_cardinality_then_weight };

// Dynamic program over subsets of right meta nodes; throws TooLargeError when
// the CBG has more than 16 meta nodes in total.
inline Pairing brute_force_pairing(const CommunityBipartiteGraph& g, OracleMode mode) {
    const std::size_t nl = g.left_nodes.size();
    const std::size_t nr = g.right_nodes.size();
    if (nl + nr > 16)
        throw TooLargeError("exhaustive pairing limited to 16 meta nodes, got " +
                            std::to_string(nl + nr));

    struct Value {
        std::size_t card = 0;
        double weight = 0.0;
    };
    const std::size_t masks = std::size_t(1) << nr;
    auto better = [&](const Value& a, const Value& b) {
        if (mode == OracleMode::max_cardinality_then_weight && a.card != b.card)
            return a.card > b.card;
        return a.weight > b.weight;
    };

    // edges grouped by left node
    std::vector<std::vector<std::size_t>> by_left(nl);
    for (std::size_t i = 0; i < g.edges.size(); ++i)
        by_left[g.edges[i].left].push_back(i);

    std::vector<std::vector<Value>> dp(nl + 1, std::vector<Value>(masks));
    // choice[i][mask]: edge used when moving from dp[i][mask'] to dp[i+1][mask]
    std::vector<std::vector<std::int64_t>> choice(nl, std::vector<std::int64_t>(masks, -1));

    for (std::size_t i = 0; i < nl; ++i) {
        for (std::size_t mask = 0; mask < masks; ++mask) {
            // skip left node i
            if (better(dp[i][mask], dp[i + 1][mask])) {
                dp[i + 1][mask] = dp[i][mask];
                choice[i][mask] = -1;
            }
            for (std::size_t ei : by_left[i]) {
                const MetaEdge& e = g.edges[ei];
                std::size_t bit = std::size_t(1) << e.right;
                if (mask & bit) continue;
                Value next{dp[i][mask].card + 1, dp[i][mask].weight + e.weight};
                if (better(next, dp[i + 1][mask | bit])) {
                    dp[i + 1][mask | bit] = next;
                    choice[i][mask | bit] = static_cast<std::int64_t>(ei);
                }
            }
        }
    }

    std::size_t best_mask = 0;
    for (std::size_t mask = 1; mask < masks; ++mask)
        if (better(dp[nl][mask], dp[nl][best_mask])) best_mask = mask;

    Pairing p;
    p.algorithm = mode == OracleMode::max_weight ? PairingAlgorithm::mwm
                                                 : PairingAlgorithm::mwpm;
    std::size_t mask = best_mask;
    for (std::size_t i = nl; i-- > 0;) {
        std::int64_t ei = choice[i][mask];
        if (ei >= 0) {
            p.selected.push_back(static_cast<std::size_t>(ei));
            mask &= ~(std::size_t(1) << g.edges[static_cast<std::size_t>(ei)].right);
        }
    }
    std::sort(p.selected.begin(), p.selected.end());
    for (std::size_t id : p.selected) {
        p.total_weight += g.edges[id].weight;
        p.total_raw += g.edges[id].raw_count;
    }
    return p;
}

} // namespace hemln
