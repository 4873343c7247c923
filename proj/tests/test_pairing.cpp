#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace hemln;
using CBG = CommunityBipartiteGraph;

namespace {

CBG small(const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges,
          std::size_t nl, std::size_t nr) {
    return CBG::for_testing(nl, nr, edges);
}

} // namespace

TEST_CASE("algorithm names parse and print", "[pairing]") {
    REQUIRE(parse_algorithm("mwm") == PairingAlgorithm::mwm);
    REQUIRE(parse_algorithm("mwpm") == PairingAlgorithm::mwpm);
    REQUIRE(parse_algorithm("mwrm") == PairingAlgorithm::mwrm);
    REQUIRE(parse_algorithm("mwmt") == PairingAlgorithm::mwmt);
    REQUIRE_THROWS_AS(parse_algorithm("nope"), InvalidParamsError);
}

TEST_CASE("max-weight vs max-participation on the classic path", "[pairing]") {
    // L0-R0 (1), L1-R0 (10), L1-R1 (1): weight favours the single heavy edge,
    // participation favours two light ones.
    CBG g = small({{0, 0, 1.0}, {1, 0, 10.0}, {1, 1, 1.0}}, 2, 2);

    Pairing mwm = max_weight_pairing(g);
    REQUIRE(mwm.size() == 1);
    REQUIRE_THAT(mwm.total_weight, Catch::Matchers::WithinAbs(10.0, 1e-12));
    REQUIRE(support::selected_pairs(g, mwm) ==
            std::vector<std::pair<int, int>>{{2, 1}});

    Pairing mwpm = max_participation_pairing(g);
    REQUIRE(mwpm.size() == 2);
    REQUIRE_THAT(mwpm.total_weight, Catch::Matchers::WithinAbs(2.0, 1e-12));
    REQUIRE(support::selected_pairs(g, mwpm) ==
            std::vector<std::pair<int, int>>{{1, 1}, {2, 2}});
}

TEST_CASE("replacement pairing swaps in heavier incident edges", "[pairing]") {
    // MWM = {(0,0)=5, (1,1)=4}; edge (0,1)=6 replaces (1,1) via its right node.
    CBG g = small({{0, 0, 5.0}, {0, 1, 6.0}, {1, 1, 4.0}}, 2, 2);
    Pairing mwm = max_weight_pairing(g);
    REQUIRE_THAT(mwm.total_weight, Catch::Matchers::WithinAbs(9.0, 1e-12));

    Pairing mwrm = replacement_pairing(g);
    REQUIRE(mwrm.size() == mwm.size());
    REQUIRE_THAT(mwrm.total_weight, Catch::Matchers::WithinAbs(11.0, 1e-12));
    REQUIRE(support::selected_pairs(g, mwrm) ==
            std::vector<std::pair<int, int>>{{1, 1}, {1, 2}});
    REQUIRE_FALSE(support::is_matching(g, mwrm)); // shares left node 1
}

TEST_CASE("replacement pairing replaces each matched edge at most once", "[pairing]") {
    // chain where one replacement could cascade if edges were revisited
    CBG g = small({{0, 0, 1.0}, {0, 1, 2.0}, {0, 2, 9.0}, {1, 1, 5.0}}, 2, 3);
    // MWM: (0,2)=9 and (1,1)=5.  Neither has a strictly heavier unselected
    // incident edge, so MWRM equals MWM.
    Pairing mwrm = replacement_pairing(g);
    REQUIRE_THAT(mwrm.total_weight, Catch::Matchers::WithinAbs(14.0, 1e-12));
}

TEST_CASE("tie expansion adds equal-weight incident edges", "[pairing]") {
    CBG g = small({{0, 0, 5.0}, {0, 1, 5.0}, {1, 2, 3.0}}, 2, 3);
    Pairing mwm = max_weight_pairing(g);
    REQUIRE(mwm.size() == 2);
    REQUIRE_THAT(mwm.total_weight, Catch::Matchers::WithinAbs(8.0, 1e-12));

    Pairing mwmt = tie_expansion_pairing(g);
    REQUIRE(mwmt.size() == 3);
    REQUIRE_THAT(mwmt.total_weight, Catch::Matchers::WithinAbs(13.0, 1e-12));
    // MWM is contained in MWMT
    for (std::size_t e : mwm.selected)
        REQUIRE(std::find(mwmt.selected.begin(), mwmt.selected.end(), e) !=
                mwmt.selected.end());
}

TEST_CASE("tie comparison uses raw counts under the edge-count metric", "[pairing]") {
    // same normalised weight by rounding would be a false tie; raw counts differ
    using Raw = std::vector<std::tuple<std::size_t, std::size_t, double, std::size_t>>;
    Raw edges = {{0, 0, 0, 7}, {0, 1, 0, 6}, {1, 2, 0, 7}};
    CBG g = CBG::for_testing_raw(2, 3, edges, WeightMetric::edge_count);
    weight_edge_count(g);
    Pairing mwmt = tie_expansion_pairing(g);
    // (0,1) raw 6 != 7: no tie with the matched (0,0); sizes stay at MWM's 2
    REQUIRE(mwmt.size() == 2);

    // under a fractional metric, near-equal weights tie at 1e-9 relative
    CBG h = CBG::for_testing(2, 3,
                             {{0, 0, 0.5}, {0, 1, 0.5 * (1 + 1e-12)}, {1, 2, 0.25}},
                             WeightMetric::density_fraction);
    Pairing t = tie_expansion_pairing(h);
    REQUIRE(t.size() == 3);
}

TEST_CASE("empty and degenerate CBGs produce empty pairings", "[pairing]") {
    CBG g = small({}, 3, 2);
    for (auto algo : {PairingAlgorithm::mwm, PairingAlgorithm::mwpm,
                      PairingAlgorithm::mwrm, PairingAlgorithm::mwmt}) {
        Pairing p = run_pairing(g, algo);
        REQUIRE(p.size() == 0);
        REQUIRE(p.total_weight == 0.0);
    }
}

TEST_CASE("matchings agree with the exhaustive oracle", "[pairing]") {
    std::mt19937_64 rng(12345);
    for (int trial = 0; trial < 300; ++trial) {
        CBG g = support::random_cbg(rng, 5, 20);
        Pairing mwm = max_weight_pairing(g);
        Pairing best_w = brute_force_pairing(g, OracleMode::max_weight);
        INFO("trial " << trial << ": mwm=" << mwm.total_weight
                      << " oracle=" << best_w.total_weight);
        REQUIRE_THAT(mwm.total_weight,
                     Catch::Matchers::WithinAbs(best_w.total_weight, 1e-9));

        Pairing mwpm = max_participation_pairing(g);
        Pairing best_c = brute_force_pairing(g, OracleMode::max_cardinality_then_weight);
        REQUIRE(mwpm.size() == best_c.size());
        REQUIRE_THAT(mwpm.total_weight,
                     Catch::Matchers::WithinAbs(best_c.total_weight, 1e-9));
    }
}

TEST_CASE("pairing family invariants hold on random instances", "[pairing]") {
    std::mt19937_64 rng(999);
    for (int trial = 0; trial < 500; ++trial) {
        CBG g = support::random_cbg(rng, 12, 20);
        Pairing mwm = max_weight_pairing(g);
        Pairing mwpm = max_participation_pairing(g);
        Pairing mwrm = replacement_pairing(g);
        Pairing mwmt = tie_expansion_pairing(g);

        REQUIRE(support::is_matching(g, mwm));
        REQUIRE(support::is_matching(g, mwpm));
        REQUIRE(mwpm.total_weight <= mwm.total_weight + 1e-9);
        REQUIRE(mwm.total_weight <= mwrm.total_weight + 1e-9);
        REQUIRE(mwm.total_weight <= mwmt.total_weight + 1e-9);
        REQUIRE(mwrm.size() == mwm.size());
        REQUIRE(mwpm.size() >= mwm.size());
        std::set<std::size_t> mt(mwmt.selected.begin(), mwmt.selected.end());
        for (std::size_t e : mwm.selected) REQUIRE(mt.count(e) == 1);
    }
}

TEST_CASE("pairings are symmetric under left/right transposition", "[pairing]") {
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 200; ++trial) {
        CBG g = support::random_cbg(rng, 8, 20);
        CBG t = support::transpose(g);
        for (auto algo : {PairingAlgorithm::mwm, PairingAlgorithm::mwpm,
                          PairingAlgorithm::mwrm, PairingAlgorithm::mwmt}) {
            Pairing pg = run_pairing(g, algo);
            Pairing pt = run_pairing(t, algo);
            auto pairs_g = support::selected_pairs(g, pg);
            auto pairs_t = support::selected_pairs(t, pt);
            for (auto& [l, r] : pairs_t) std::swap(l, r);
            std::sort(pairs_t.begin(), pairs_t.end());
            INFO("trial " << trial << " algo " << to_string(algo));
            REQUIRE(pairs_g == pairs_t);
        }
    }
}

TEST_CASE("pairings are deterministic", "[pairing]") {
    std::mt19937_64 rng(77);
    CBG g = support::random_cbg(rng, 10, 20);
    for (auto algo : {PairingAlgorithm::mwm, PairingAlgorithm::mwpm,
                      PairingAlgorithm::mwrm, PairingAlgorithm::mwmt}) {
        Pairing p1 = run_pairing(g, algo);
        Pairing p2 = run_pairing(g, algo);
        REQUIRE(p1.selected == p2.selected);
    }
}

TEST_CASE("exhaustive oracle rejects oversized instances", "[pairing]") {
    CBG g = small({}, 9, 8);
    REQUIRE_THROWS_AS(brute_force_pairing(g, OracleMode::max_weight), TooLargeError);
}
