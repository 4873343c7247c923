#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "support.hpp"

using namespace hemln;
using support::HandCoupling;
using support::HandLayer;
using support::make_hand_mln;

TEST_CASE("metric names parse and print", "[meta]") {
    REQUIRE(parse_metric("we") == WeightMetric::edge_count);
    REQUIRE(parse_metric("wd") == WeightMetric::density_fraction);
    REQUIRE(parse_metric("wh") == WeightMetric::hub_participation);
    REQUIRE(std::string(to_string(WeightMetric::edge_count)) == "we");
    REQUIRE_THROWS_AS(parse_metric("bogus"), InvalidParamsError);
}

TEST_CASE("hub detection uses strict mean threshold with fallback", "[meta]") {
    // star: center degree 3, leaves 1; mean 1.5 -> only the center is a hub
    Graph star = support::make_graph("s", {{"h", "s1"}, {"h", "s2"}, {"h", "s3"}});
    auto a = CommunityAssignment::from_membership("s", {1, 1, 1, 1});
    auto hubs = detect_hubs(star, a);
    REQUIRE(hubs.size() == 1);
    REQUIRE(hubs[0].hubs == std::vector<NodeIndex>{*star.find("h")});

    // triangle: all degrees equal -> nobody strictly above mean -> all members
    Graph tri = support::make_graph("t", {{"a", "b"}, {"a", "c"}, {"b", "c"}});
    auto at = CommunityAssignment::from_membership("t", {1, 1, 1});
    REQUIRE(detect_hubs(tri, at)[0].hubs.size() == 3);

    // the threshold factor is adjustable
    REQUIRE(detect_hubs(tri, at, 0.0)[0].hubs.size() == 3); // all deg > 0
    Graph path = support::make_graph("p", {{"a", "b"}, {"b", "c"}});
    auto ap = CommunityAssignment::from_membership("p", {1, 1, 1});
    REQUIRE(detect_hubs(path, ap)[0].hubs ==
            std::vector<NodeIndex>{*path.find("b")});
    REQUIRE(detect_hubs(path, ap, 2.0)[0].hubs.size() == 3); // none above 8/3
}

namespace {

support::HandMln edge_count_fixture() {
    return make_hand_mln(
        {HandLayer{"A", {{"a1", "a2"}, {"a3", "a4"}, {"a5"}}},
         HandLayer{"B", {{"b1", "b2"}, {"b3", "b4"}}}},
        {HandCoupling{"A", "B",
                      {{"a1", "b1"}, {"a2", "b2"}, {"a3", "b3"}, {"a5", "b1"}}}});
}

} // namespace

TEST_CASE("edge-count weights normalise by the CBG maximum", "[meta]") {
    auto h = edge_count_fixture();
    auto cbg = build_cbg(h.mln, h.store.at("A"), h.store.at("B"),
                         WeightMetric::edge_count);

    REQUIRE(cbg.left_nodes.size() == 2); // singleton community excluded
    REQUIRE(cbg.right_nodes.size() == 2);
    REQUIRE(cbg.edges.size() == 2);

    const MetaEdge& e0 = cbg.edges[0]; // (A1,B1)
    REQUIRE(cbg.left_nodes[e0.left].community == 1);
    REQUIRE(cbg.right_nodes[e0.right].community == 1);
    REQUIRE(e0.raw_count == 2);
    REQUIRE_THAT(e0.weight, Catch::Matchers::WithinAbs(1.0, 1e-12));
    auto labelled = support::labelled_couplings(e0.expanded, h.mln.layer("A"),
                                                h.mln.layer("B"));
    REQUIRE(labelled == std::vector<std::pair<std::string, std::string>>{
                            {"a1", "b1"}, {"a2", "b2"}});

    const MetaEdge& e1 = cbg.edges[1]; // (A2,B2)
    REQUIRE(e1.raw_count == 1);
    REQUIRE_THAT(e1.weight, Catch::Matchers::WithinAbs(0.5, 1e-12));
}

TEST_CASE("edge-count weights are invariant under uniform scaling", "[meta]") {
    using Raw = std::vector<std::tuple<std::size_t, std::size_t, double, std::size_t>>;
    Raw base = {{0, 0, 0, 2}, {0, 1, 0, 4}, {1, 1, 0, 6}};
    Raw scaled = {{0, 0, 0, 6}, {0, 1, 0, 12}, {1, 1, 0, 18}};
    auto a = CommunityBipartiteGraph::for_testing_raw(2, 2, base);
    auto b = CommunityBipartiteGraph::for_testing_raw(2, 2, scaled);
    weight_edge_count(a);
    weight_edge_count(b);
    REQUIRE(a.edges.size() == b.edges.size());
    for (std::size_t i = 0; i < a.edges.size(); ++i)
        REQUIRE_THAT(a.edges[i].weight,
                     Catch::Matchers::WithinAbs(b.edges[i].weight, 1e-12));
    REQUIRE_THAT(a.edges[2].weight, Catch::Matchers::WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(a.edges[0].weight, Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-12));
}

TEST_CASE("density-fraction weight matches the hand-computed value", "[meta]") {
    MlnDraft d;
    d.layers.push_back(
        support::make_graph("A", {{"a1", "a2"}, {"a1", "a3"}, {"a2", "a3"}}));
    d.layers.push_back(support::make_graph("B", {{"b1", "b2"}, {"b2", "b3"}}));
    d.interlayer.push_back({"A", "B", {{"a1", "b1"}, {"a2", "b2"}}});
    auto mln = MultilayerNetwork::from_draft(std::move(d));

    ArtifactStore store;
    store["A"] = make_layer_artifacts(
        mln.layer("A"), CommunityAssignment::from_membership("A", {1, 1, 1}));
    store["B"] = make_layer_artifacts(
        mln.layer("B"), CommunityAssignment::from_membership("B", {1, 1, 1}));

    auto cbg = build_cbg(mln, store.at("A"), store.at("B"),
                         WeightMetric::density_fraction);
    REQUIRE(cbg.edges.size() == 1);
    // density(A1)=1, coupling fraction = 2/9, density(B1)=2/3 -> 4/27
    REQUIRE_THAT(cbg.edges[0].weight,
                 Catch::Matchers::WithinAbs(4.0 / 27.0, 1e-12));
    REQUIRE(cbg.edges[0].raw_count == 2);
}

namespace {

MultilayerNetwork hub_metric_mln(
    const std::vector<std::pair<std::string, std::string>>& links) {
    MlnDraft d;
    d.layers.push_back(support::make_graph("L", {{"a", "b"}, {"b", "c"}}));
    d.layers.push_back(support::make_graph("R", {{"d", "e"}}));
    d.interlayer.push_back({"L", "R", links});
    return MultilayerNetwork::from_draft(std::move(d));
}

ArtifactStore hub_metric_store(const MultilayerNetwork& mln) {
    ArtifactStore store;
    store["L"] = make_layer_artifacts(
        mln.layer("L"), CommunityAssignment::from_membership("L", {1, 1, 1}));
    store["R"] = make_layer_artifacts(
        mln.layer("R"), CommunityAssignment::from_membership("R", {1, 1}));
    return store;
}

} // namespace

TEST_CASE("hub-participation weight matches hand-computed values", "[meta]") {
    // L community = path a-b-c (hubs {b}), R community = edge d-e (all hubs)
    {
        auto mln = hub_metric_mln({{"b", "d"}});
        auto store = hub_metric_store(mln);
        auto cbg = build_cbg(mln, store.at("L"), store.at("R"),
                             WeightMetric::hub_participation);
        REQUIRE(cbg.edges.size() == 1);
        // (1/1) * 1/(3*2) * (1/2) = 1/12
        REQUIRE_THAT(cbg.edges[0].weight,
                     Catch::Matchers::WithinAbs(1.0 / 12.0, 1e-12));
    }
    {
        auto mln = hub_metric_mln({{"b", "d"}, {"b", "e"}});
        auto store = hub_metric_store(mln);
        auto cbg = build_cbg(mln, store.at("L"), store.at("R"),
                             WeightMetric::hub_participation);
        // (1/1) * 2/6 * (2/2) = 1/3
        REQUIRE_THAT(cbg.edges[0].weight,
                     Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-12));
    }
}

TEST_CASE("hub-participation prunes zero-weight meta edges", "[meta]") {
    // coupling touches only a non-hub on the left -> weight 0 -> edge removed
    auto mln = hub_metric_mln({{"a", "d"}});
    auto store = hub_metric_store(mln);
    auto cbg = build_cbg(mln, store.at("L"), store.at("R"),
                         WeightMetric::hub_participation);
    REQUIRE(cbg.edges.empty());
    REQUIRE(cbg.left_nodes.size() == 1); // meta nodes stay
}

TEST_CASE("restricted CBGs renormalise within the restriction", "[meta]") {
    auto h = edge_count_fixture();
    std::set<int> left_allowed = {2};
    auto cbg = build_cbg_restricted(h.mln, h.store.at("A"), h.store.at("B"),
                                    WeightMetric::edge_count, &left_allowed, nullptr);
    REQUIRE(cbg.left_nodes.size() == 1);
    REQUIRE(cbg.edges.size() == 1);
    // (A2,B2) has the only (and thus maximal) count in the restricted CBG
    REQUIRE_THAT(cbg.edges[0].weight, Catch::Matchers::WithinAbs(1.0, 1e-12));

    std::set<int> right_allowed = {1};
    auto cbg2 = build_cbg_restricted(h.mln, h.store.at("A"), h.store.at("B"),
                                     WeightMetric::edge_count, nullptr, &right_allowed);
    REQUIRE(cbg2.right_nodes.size() == 1);
    REQUIRE(cbg2.edges.size() == 1);
    REQUIRE(cbg2.edges[0].raw_count == 2);
}

TEST_CASE("CBG edges are sorted and unique per community pair", "[meta]") {
    auto h = edge_count_fixture();
    auto cbg = build_cbg(h.mln, h.store.at("A"), h.store.at("B"),
                         WeightMetric::edge_count);
    for (std::size_t i = 1; i < cbg.edges.size(); ++i) {
        auto prev = std::make_pair(cbg.edges[i - 1].left, cbg.edges[i - 1].right);
        auto cur = std::make_pair(cbg.edges[i].left, cbg.edges[i].right);
        REQUIRE(prev < cur);
    }
    REQUIRE(cbg.left_index_of(1).has_value());
    REQUIRE_FALSE(cbg.left_index_of(3).has_value()); // singleton not a meta node

    std::ostringstream out;
    write_cbg(out, cbg);
    std::string dump = out.str();
    REQUIRE(dump.find("metric=we") != std::string::npos);
    REQUIRE(std::count(dump.begin(), dump.end(), '\n') == 3); // header + 2 edges
}
