#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hemln/errors.hpp"
#include "hemln/mln.hpp"

namespace hemln {

// ---------------------------------------------------------------------------
// Planted-partition generator
//
// Each layer holds `blocks` blocks of `block_size` nodes; node pairs inside a
// block get an edge with probability p_in, across blocks with p_out.
// Consecutive layers are coupled: same-block node pairs link with probability
// `coupling`, and uniformly random noise couplings are added on top
// (noise_fraction of the signal count; duplicates are skipped).
// ---------------------------------------------------------------------------

struct PlantedParams {
    std::size_t layers = 2;
    std::size_t blocks = 3;
    std::size_t block_size = 10;
    double p_in = 0.4;
    double p_out = 0.02;
    double coupling = 0.3;
    double noise_fraction = 0.1;
    std::uint64_t seed = 1;
};

struct PlantedMln {
    MultilayerNetwork mln;
    PlantedParams params;
    std::vector<std::vector<int>> block_of; // [layer][node index] -> 1..blocks
};

inline PlantedMln gen_planted_mln(const PlantedParams& p) {
    if (p.layers < 1 || p.blocks < 1 || p.block_size < 1)
        throw InvalidParamsError("planted generator needs layers, blocks and "
                                 "block_size all >= 1");
    if (p.p_in < 0 || p.p_in > 1 || p.p_out < 0 || p.p_out > 1 || p.coupling < 0 ||
        p.coupling > 1)
        throw InvalidParamsError("planted generator probabilities must be in [0,1]");
    if (p.noise_fraction < 0)
        throw InvalidParamsError("noise_fraction must be >= 0");

    std::mt19937_64 rng(p.seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const std::size_t n = p.blocks * p.block_size;

    // Zero-padded numeric suffixes keep lexicographic order equal to numeric
    // order, so canonical node indices equal generation indices.
    std::size_t width = 1;
    for (std::size_t x = n > 0 ? n - 1 : 0; x >= 10; x /= 10) ++width;
    auto node_name = [&](std::size_t layer, std::size_t i) {
        std::string num = std::to_string(i);
        return "L" + std::to_string(layer + 1) + "_" +
               std::string(width - num.size(), '0') + num;
    };

    MlnDraft draft;
    for (std::size_t l = 0; l < p.layers; ++l) {
        GraphBuilder b("L" + std::to_string(l + 1));
        for (std::size_t i = 0; i < n; ++i) b.add_node(node_name(l, i));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                bool same = (i / p.block_size) == (j / p.block_size);
                if (coin(rng) < (same ? p.p_in : p.p_out))
                    b.add_edge(node_name(l, i), node_name(l, j));
            }
        }
        draft.layers.push_back(b.build());
    }

    for (std::size_t l = 0; l + 1 < p.layers; ++l) {
        RawInterLayer x;
        x.left = "L" + std::to_string(l + 1);
        x.right = "L" + std::to_string(l + 2);
        std::set<std::pair<std::size_t, std::size_t>> used;
        for (std::size_t b = 0; b < p.blocks; ++b) {
            for (std::size_t i = b * p.block_size; i < (b + 1) * p.block_size; ++i)
                for (std::size_t j = b * p.block_size; j < (b + 1) * p.block_size; ++j)
                    if (coin(rng) < p.coupling && used.insert({i, j}).second)
                        x.links.emplace_back(node_name(l, i), node_name(l + 1, j));
        }
        const std::size_t noise =
            static_cast<std::size_t>(p.noise_fraction *
                                     static_cast<double>(x.links.size()));
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t t = 0; t < noise; ++t) {
            std::size_t i = pick(rng), j = pick(rng);
            if (used.insert({i, j}).second)
                x.links.emplace_back(node_name(l, i), node_name(l + 1, j));
        }
        draft.interlayer.push_back(std::move(x));
    }

    PlantedMln out;
    out.params = p;
    out.block_of.assign(p.layers, std::vector<int>(n, 0));
    for (std::size_t l = 0; l < p.layers; ++l)
        for (std::size_t i = 0; i < n; ++i)
            out.block_of[l][i] = static_cast<int>(i / p.block_size) + 1;
    out.mln = MultilayerNetwork::from_draft(std::move(draft));
    return out;
}

} // namespace hemln
