#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hemln/errors.hpp"
#include "hemln/graph.hpp"

namespace hemln {

// ---------------------------------------------------------------------------
// Configuration
//
// A network is described by a JSON file:
//   {
//     "layers":     [ {"name": "A", "edges": "actor.edges"}, ... ],
//     "interlayer": [ {"left": "A", "right": "D", "edges": "a_d.links"}, ... ]
//   }
// Edge paths are resolved relative to the directory of the config file.
// ---------------------------------------------------------------------------

struct LayerConfig {
    std::string name;
    std::string edges_path;
    std::string nodes_path; // optional: declares nodes with no intra-layer edge
};

struct InterLayerConfig {
    std::string left;
    std::string right;
    std::string edges_path;
};

struct MlnConfig {
    std::vector<LayerConfig> layers;
    std::vector<InterLayerConfig> interlayer;

    static MlnConfig from_json(const nlohmann::json& j) {
        MlnConfig cfg;
        if (!j.is_object() || !j.contains("layers") || !j["layers"].is_array())
            throw ValidationError("config: expected object with a \"layers\" array");
        for (const auto& l : j["layers"])
            cfg.layers.push_back({l.at("name").get<std::string>(),
                                  l.at("edges").get<std::string>(),
                                  l.value("nodes", std::string())});
        if (j.contains("interlayer"))
            for (const auto& x : j["interlayer"])
                cfg.interlayer.push_back({x.at("left").get<std::string>(),
                                          x.at("right").get<std::string>(),
                                          x.at("edges").get<std::string>()});
        return cfg;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["layers"] = nlohmann::json::array();
        for (const auto& l : layers) {
            nlohmann::json e = {{"name", l.name}, {"edges", l.edges_path}};
            if (!l.nodes_path.empty()) e["nodes"] = l.nodes_path;
            j["layers"].push_back(std::move(e));
        }
        j["interlayer"] = nlohmann::json::array();
        for (const auto& x : interlayer)
            j["interlayer"].push_back(
                {{"left", x.left}, {"right", x.right}, {"edges", x.edges_path}});
        return j;
    }

    static MlnConfig from_json_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw FileError("cannot open config file: " + path.string());
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.string(), 0, std::string("invalid JSON: ") + e.what());
        }
        return from_json(j);
    }

    void to_json_file(const std::filesystem::path& path) const {
        std::ofstream out(path);
        if (!out) throw FileError("cannot write config file: " + path.string());
        out << to_json().dump(2) << "\n";
    }
};

// ---------------------------------------------------------------------------
// Edge file parsing
//
// One edge per line: two whitespace-separated node ids.  Blank lines and
// lines starting with '#' are skipped.  Anything else with a token count
// other than two is a ParseError carrying path and line number.
// ---------------------------------------------------------------------------

namespace detail {

template <class F>
inline void parse_edge_lines(const std::filesystem::path& path, F&& on_edge) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open edge file: " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ss(line);
        std::string a, b, extra;
        ss >> a >> b;
        if (b.empty())
            throw ParseError(path.string(), line_no, "expected two node ids, got one");
        if (ss >> extra)
            throw ParseError(path.string(), line_no,
                             "expected two node ids, found extra token \"" + extra + "\"");
        on_edge(std::move(a), std::move(b));
    }
}

} // namespace detail

inline Graph read_layer_edge_file(const std::filesystem::path& path, std::string name) {
    GraphBuilder b(std::move(name));
    detail::parse_edge_lines(path, [&](std::string a, std::string c) {
        b.add_edge(std::move(a), std::move(c));
    });
    return b.build();
}

// One node id per line; used to declare nodes that have no intra-layer edge.
inline std::vector<std::string> read_node_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open node file: " + path.string());
    std::vector<std::string> nodes;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ss(line);
        std::string a, extra;
        ss >> a;
        if (ss >> extra)
            throw ParseError(path.string(), line_no,
                             "expected one node id, found extra token \"" + extra + "\"");
        nodes.push_back(std::move(a));
    }
    return nodes;
}

inline std::vector<std::pair<std::string, std::string>>
read_link_file(const std::filesystem::path& path) {
    std::vector<std::pair<std::string, std::string>> links;
    detail::parse_edge_lines(path, [&](std::string a, std::string b) {
        links.emplace_back(std::move(a), std::move(b));
    });
    return links;
}

// ---------------------------------------------------------------------------
// Draft and validation
// ---------------------------------------------------------------------------

struct RawInterLayer {
    std::string left;
    std::string right;
    std::vector<std::pair<std::string, std::string>> links; // (left node, right node)
};

// Parsed but not yet validated network.
struct MlnDraft {
    std::vector<Graph> layers;
    std::vector<RawInterLayer> interlayer;
};

struct Violation {
    std::string where;   // layer name, "L1|L2" pair, or "config"
    std::string message;
};

inline MlnDraft parse_mln(const MlnConfig& cfg, const std::filesystem::path& base_dir) {
    MlnDraft d;
    for (const auto& l : cfg.layers) {
        GraphBuilder b(l.name);
        detail::parse_edge_lines(base_dir / l.edges_path, [&](std::string a, std::string c) {
            b.add_edge(std::move(a), std::move(c));
        });
        if (!l.nodes_path.empty())
            for (auto& n : read_node_file(base_dir / l.nodes_path))
                b.add_node(std::move(n));
        d.layers.push_back(b.build());
    }
    for (const auto& x : cfg.interlayer)
        d.interlayer.push_back({x.left, x.right, read_link_file(base_dir / x.edges_path)});
    return d;
}

// Checks every structural invariant and reports all violations at once:
//  - layer names unique, at least one layer
//  - node sets of distinct layers disjoint
//  - coupling sets reference declared, distinct layers, each pair at most once
//  - every coupling endpoint exists in its layer
inline std::vector<Violation> validate_mln(const MlnDraft& d) {
    std::vector<Violation> out;
    if (d.layers.empty())
        out.push_back({"config", "network has no layers"});

    std::map<std::string, std::size_t> layer_of;
    for (std::size_t i = 0; i < d.layers.size(); ++i) {
        const auto& name = d.layers[i].name();
        if (layer_of.count(name))
            out.push_back({name, "duplicate layer name"});
        else
            layer_of[name] = i;
    }

    std::map<std::string, std::string> owner; // node label -> layer name
    for (const auto& g : d.layers) {
        for (NodeIndex v = 0; v < g.node_count(); ++v) {
            auto [it, fresh] = owner.emplace(g.label(v), g.name());
            if (!fresh && it->second != g.name())
                out.push_back({g.name(), "node \"" + g.label(v) +
                                             "\" already belongs to layer " + it->second});
        }
    }

    std::set<std::pair<std::string, std::string>> seen_pairs;
    for (const auto& x : d.interlayer) {
        const std::string where = x.left + "|" + x.right;
        auto li = layer_of.find(x.left);
        auto ri = layer_of.find(x.right);
        if (li == layer_of.end()) {
            out.push_back({where, "unknown layer \"" + x.left + "\""});
            continue;
        }
        if (ri == layer_of.end()) {
            out.push_back({where, "unknown layer \"" + x.right + "\""});
            continue;
        }
        if (x.left == x.right) {
            out.push_back({where, "coupling set must join two distinct layers"});
            continue;
        }
        auto key = std::minmax(x.left, x.right);
        if (!seen_pairs.insert(key).second)
            out.push_back({where, "layer pair declared more than once"});

        const Graph& gl = d.layers[li->second];
        const Graph& gr = d.layers[ri->second];
        for (const auto& [a, b] : x.links) {
            if (!gl.find(a))
                out.push_back({where, "coupling endpoint \"" + a +
                                          "\" not found in layer " + x.left});
            if (!gr.find(b))
                out.push_back({where, "coupling endpoint \"" + b +
                                          "\" not found in layer " + x.right});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// MultilayerNetwork: validated, indexed form
// ---------------------------------------------------------------------------

class MultilayerNetwork {
public:
    static MultilayerNetwork from_draft(MlnDraft d) {
        auto violations = validate_mln(d);
        if (!violations.empty()) {
            std::string msg = "network validation failed:";
            for (const auto& v : violations)
                msg += "\n  [" + v.where + "] " + v.message;
            throw ValidationError(msg);
        }
        MultilayerNetwork m;
        m.layers_ = std::move(d.layers);
        for (std::size_t i = 0; i < m.layers_.size(); ++i)
            m.index_[m.layers_[i].name()] = i;
        for (const auto& x : d.interlayer) {
            std::size_t li = m.index_.at(x.left);
            std::size_t ri = m.index_.at(x.right);
            bool flip = li > ri;
            auto key = flip ? std::make_pair(ri, li) : std::make_pair(li, ri);
            auto& vec = m.links_[key];
            const Graph& gl = m.layers_[flip ? ri : li];
            const Graph& gr = m.layers_[flip ? li : ri];
            for (const auto& [a, b] : x.links) {
                const std::string& low = flip ? b : a;
                const std::string& high = flip ? a : b;
                vec.emplace_back(*gl.find(low), *gr.find(high));
            }
            std::sort(vec.begin(), vec.end());
            vec.erase(std::unique(vec.begin(), vec.end()), vec.end());
        }
        return m;
    }

    std::size_t layer_count() const { return layers_.size(); }

    const Graph& layer(std::size_t i) const { return layers_[i]; }

    const Graph& layer(std::string_view name) const {
        return layers_[layer_index_or_throw(name)];
    }

    std::optional<std::size_t> layer_index(std::string_view name) const {
        auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    bool has_links(std::string_view a, std::string_view b) const {
        auto ia = layer_index(a), ib = layer_index(b);
        if (!ia || !ib) return false;
        return links_.count(ordered(*ia, *ib)) > 0;
    }

    // Couplings oriented so that .first is a node of `from` and .second of `to`.
    // Throws NoInterLayerError when the pair has no declared coupling set.
    std::vector<std::pair<NodeIndex, NodeIndex>>
    links_between(std::string_view from, std::string_view to) const {
        std::size_t fi = layer_index_or_throw(from);
        std::size_t ti = layer_index_or_throw(to);
        auto it = links_.find(ordered(fi, ti));
        if (it == links_.end())
            throw NoInterLayerError("no coupling set between layers " +
                                    std::string(from) + " and " + std::string(to));
        if (fi < ti) return it->second;
        std::vector<std::pair<NodeIndex, NodeIndex>> flipped;
        flipped.reserve(it->second.size());
        for (auto [a, b] : it->second) flipped.emplace_back(b, a);
        std::sort(flipped.begin(), flipped.end());
        return flipped;
    }

    std::size_t total_inter_edges() const {
        std::size_t n = 0;
        for (const auto& [k, v] : links_) n += v.size();
        return n;
    }

    // All declared layer pairs, by index, first < second.
    std::vector<std::pair<std::size_t, std::size_t>> coupled_pairs() const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (const auto& [k, v] : links_) out.push_back(k);
        return out;
    }

private:
    std::size_t layer_index_or_throw(std::string_view name) const {
        auto it = index_.find(name);
        if (it == index_.end())
            throw Error("unknown layer \"" + std::string(name) + "\"");
        return it->second;
    }

    static std::pair<std::size_t, std::size_t> ordered(std::size_t a, std::size_t b) {
        return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    }

    std::vector<Graph> layers_;
    std::map<std::string, std::size_t, std::less<>> index_;
    std::map<std::pair<std::size_t, std::size_t>,
             std::vector<std::pair<NodeIndex, NodeIndex>>>
        links_;
};

inline MultilayerNetwork load_mln(const MlnConfig& cfg,
                                  const std::filesystem::path& base_dir) {
    return MultilayerNetwork::from_draft(parse_mln(cfg, base_dir));
}

inline MultilayerNetwork load_mln(const std::filesystem::path& config_path) {
    auto cfg = MlnConfig::from_json_file(config_path);
    return load_mln(cfg, config_path.parent_path());
}

// Type-independent collapse: union of all nodes, all intra-layer edges and
// all couplings thrown into one simple graph.  Because layer node sets are
// disjoint, labels never clash.
inline Graph collapse_type_independent(const MultilayerNetwork& m) {
    GraphBuilder b("aggregate");
    for (std::size_t i = 0; i < m.layer_count(); ++i) {
        const Graph& g = m.layer(i);
        for (NodeIndex v = 0; v < g.node_count(); ++v) b.add_node(g.label(v));
        g.for_each_edge([&](NodeIndex u, NodeIndex v) {
            b.add_edge(g.label(u), g.label(v));
        });
    }
    for (auto [li, ri] : m.coupled_pairs()) {
        const Graph& gl = m.layer(li);
        const Graph& gr = m.layer(ri);
        for (auto [u, v] : m.links_between(gl.name(), gr.name()))
            b.add_edge(gl.label(u), gr.label(v));
    }
    return b.build();
}

// Writes the network as a config + edge files under `dir`; returns the
// config path.  Output is canonical, so it round-trips through load_mln.
inline std::filesystem::path write_mln(const MultilayerNetwork& m,
                                       const std::filesystem::path& dir,
                                       const std::string& config_name = "mln.json") {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    MlnConfig cfg;
    for (std::size_t i = 0; i < m.layer_count(); ++i) {
        const Graph& g = m.layer(i);
        std::string fname = g.name() + ".edges";
        std::ofstream out(dir / fname);
        if (!out) throw FileError("cannot write " + (dir / fname).string());
        g.for_each_edge([&](NodeIndex u, NodeIndex v) {
            out << g.label(u) << "\t" << g.label(v) << "\n";
        });
        std::vector<NodeIndex> isolated;
        for (NodeIndex v = 0; v < g.node_count(); ++v)
            if (g.degree(v) == 0) isolated.push_back(v);
        std::string nodes_fname;
        if (!isolated.empty()) {
            nodes_fname = g.name() + ".nodes";
            std::ofstream nout(dir / nodes_fname);
            if (!nout) throw FileError("cannot write " + (dir / nodes_fname).string());
            for (NodeIndex v : isolated) nout << g.label(v) << "\n";
        }
        cfg.layers.push_back({g.name(), fname, nodes_fname});
    }
    for (auto [li, ri] : m.coupled_pairs()) {
        const Graph& gl = m.layer(li);
        const Graph& gr = m.layer(ri);
        std::string fname = gl.name() + "_" + gr.name() + ".links";
        std::ofstream out(dir / fname);
        if (!out) throw FileError("cannot write " + (dir / fname).string());
        for (auto [u, v] : m.links_between(gl.name(), gr.name()))
            out << gl.label(u) << "\t" << gr.label(v) << "\n";
        cfg.interlayer.push_back({gl.name(), gr.name(), fname});
    }
    fs::path cfg_path = dir / config_name;
    cfg.to_json_file(cfg_path);
    return cfg_path;
}

} // namespace hemln
