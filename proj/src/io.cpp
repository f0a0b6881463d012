#include "pbit/io.hpp"

#include "pbit/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pbit {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    if (s.empty()) throw config_error("number: empty string");
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) throw config_error("number: cannot parse '" + s + "'");
    return v;
}

nlohmann::json model_to_json(const IsingModel& model) {
    const ChimeraTopology& topo = model.topology();
    nlohmann::json j;
    j["format"] = "pbit-model-v1";
    nlohmann::json disabled = nlohmann::json::array();
    for (const CellCoord& c : topo.disabled_cells()) disabled.push_back({c.row, c.col});
    j["topology"] = {{"rows", topo.rows()},
                     {"cols", topo.cols()},
                     {"shore_size", topo.shore_size()},
                     {"disabled_cells", disabled}};
    j["weight_scale"] = format_double(model.weight_scale());
    j["bias_scale"] = format_double(model.bias_scale());
    nlohmann::json edges = nlohmann::json::array();
    for (int k = 0; k < model.edge_count(); ++k) {
        const Edge& e = topo.edges()[k];
        edges.push_back({{"node_a", e.a},
                         {"node_b", e.b},
                         {"code", static_cast<int>(model.coupling_code(k))},
                         {"enabled", model.edge_enabled(k)}});
    }
    j["edges"] = edges;
    nlohmann::json nodes = nlohmann::json::array();
    for (int i = 0; i < model.node_count(); ++i)
        nodes.push_back({{"id", i}, {"bias_code", static_cast<int>(model.bias_code(i))}});
    j["nodes"] = nodes;
    return j;
}

namespace {

WeightCode checked_code(int code, const char* what) {
    if (code < -kCodeMax || code > kCodeMax)
        throw config_error(std::string(what) + ": code " + std::to_string(code) +
                           " outside [-127, 127]");
    return static_cast<WeightCode>(code);
}

} // namespace

IsingModel model_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw config_error("model: document must be an object");
    if (j.value("format", "") != std::string("pbit-model-v1"))
        throw config_error("model: unknown format tag");
    const auto& jt = j.at("topology");
    std::vector<CellCoord> disabled;
    for (const auto& c : jt.at("disabled_cells"))
        disabled.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
    auto topo = std::make_shared<const ChimeraTopology>(jt.at("rows").get<int>(), jt.at("cols").get<int>(),
                                                        jt.at("shore_size").get<int>(), disabled);
    const double wscale = parse_double(j.at("weight_scale").get<std::string>());
    const double bscale = parse_double(j.at("bias_scale").get<std::string>());
    IsingModel model(topo, wscale, bscale);

    const auto& jedges = j.at("edges");
    if (jedges.size() != static_cast<std::size_t>(topo->edge_count()))
        throw config_error("model: edge list does not match the topology");
    for (int k = 0; k < topo->edge_count(); ++k) {
        const auto& je = jedges.at(k);
        const Edge& e = topo->edges()[k];
        if (je.at("node_a").get<int>() != e.a || je.at("node_b").get<int>() != e.b)
            throw config_error("model: edge " + std::to_string(k) + " does not match the topology");
        model.set_coupling_code(k, checked_code(je.at("code").get<int>(), "model edge"));
        model.set_edge_enabled(k, je.at("enabled").get<bool>());
    }
    const auto& jnodes = j.at("nodes");
    if (jnodes.size() != static_cast<std::size_t>(topo->node_count()))
        throw config_error("model: node list does not match the topology");
    for (int i = 0; i < topo->node_count(); ++i) {
        const auto& jn = jnodes.at(i);
        if (jn.at("id").get<int>() != i) throw config_error("model: node list must be id-ordered");
        model.set_bias_code(i, checked_code(jn.at("bias_code").get<int>(), "model bias"));
    }
    return model;
}

void save_model(const IsingModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("model: cannot open '" + path.string() + "' for writing");
    out << model_to_json(model).dump(2) << '\n';
}

IsingModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("model: cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("model: " + path.string() + ": " + e.what());
    }
    return model_from_json(j);
}

Graph parse_graph_edgelist(const std::string& text) {
    Graph g;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        WeightedEdge e;
        if (!(ls >> e.u >> e.v >> e.w))
            throw config_error("graph: line " + std::to_string(lineno) + ": expected 'u v w'");
        std::string rest;
        if (ls >> rest)
            throw config_error("graph: line " + std::to_string(lineno) + ": trailing tokens");
        g.edges.push_back(e);
        g.node_count = std::max({g.node_count, e.u + 1, e.v + 1});
    }
    return g;
}

Graph graph_from_json(const nlohmann::json& j) {
    Graph g;
    g.node_count = j.at("nodes").get<int>();
    for (const auto& je : j.at("edges")) {
        if (!je.is_array() || je.size() != 3) throw config_error("graph: edges must be [u, v, w]");
        g.edges.push_back({je.at(0).get<int>(), je.at(1).get<int>(), je.at(2).get<double>()});
    }
    return g;
}

Graph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("graph: cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    if (path.extension() == ".json") {
        try {
            return graph_from_json(nlohmann::json::parse(buf.str()));
        } catch (const nlohmann::json::exception& e) {
            throw config_error("graph: " + path.string() + ": " + e.what());
        }
    }
    return parse_graph_edgelist(buf.str());
}

std::string pattern_bitstring(std::uint64_t pattern, std::size_t bits) {
    std::string s(bits, '0');
    for (std::size_t i = 0; i < bits; ++i)
        if ((pattern >> i) & 1) s[i] = '1';
    return s;
}

nlohmann::json target_to_json(const TargetDistribution& target) {
    nlohmann::json probs = nlohmann::json::object();
    for (std::size_t p = 0; p < target.probs.size(); ++p)
        if (target.probs[p] > 0)
            probs[pattern_bitstring(p, target.designated_nodes.size())] = target.probs[p];
    return {{"nodes", target.designated_nodes}, {"probs", probs}};
}

TargetDistribution target_from_json(const nlohmann::json& j) {
    TargetDistribution t;
    t.designated_nodes = j.at("nodes").get<std::vector<int>>();
    if (t.designated_nodes.empty() || t.designated_nodes.size() > 24)
        throw config_error("target: designated node count must be in [1, 24]");
    t.probs.assign(std::uint64_t{1} << t.designated_nodes.size(), 0.0);
    for (const auto& [key, value] : j.at("probs").items()) {
        if (key.size() != t.designated_nodes.size())
            throw config_error("target: bitstring '" + key + "' has the wrong length");
        std::uint64_t pattern = 0;
        for (std::size_t i = 0; i < key.size(); ++i) {
            if (key[i] == '1')
                pattern |= std::uint64_t{1} << i;
            else if (key[i] != '0')
                throw config_error("target: bitstring '" + key + "' has non-binary characters");
        }
        t.probs[pattern] = value.get<double>();
    }
    t.validate();
    return t;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace pbit
