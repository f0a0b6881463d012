#include "pbit/problems.hpp"

#include "pbit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace pbit {

namespace {

std::uint64_t pair_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

SpinState state_from_index(std::uint64_t idx, int n) {
    SpinState s;
    s.m.resize(n);
    for (int k = 0; k < n; ++k) s.m[k] = (idx >> k) & 1 ? 1 : -1;
    return s;
}

} // namespace

IsingModel maxcut_encode(const Graph& graph, std::shared_ptr<const ChimeraTopology> topology) {
    if (graph.node_count > topology->node_count())
        throw embed_error("maxcut: graph has more nodes than the fabric");
    std::unordered_map<std::uint64_t, int> edge_of_pair;
    for (int k = 0; k < topology->edge_count(); ++k) {
        const Edge& e = topology->edges()[k];
        edge_of_pair.emplace(pair_key(e.a, e.b), k);
    }
    double wmax = 0.0;
    for (const auto& e : graph.edges) wmax = std::max(wmax, std::abs(e.w));
    if (wmax == 0.0) wmax = 1.0;

    // The model is full-scale normalized (|J| <= 1): the largest weight maps
    // to code +-127 and the annealing beta range applies unchanged. Energies
    // are in units of max|w|; cut values on the original graph are unaffected.
    IsingModel model(std::move(topology), 1.0, 1.0);
    for (int k = 0; k < model.edge_count(); ++k) model.set_edge_enabled(k, false);
    for (const auto& e : graph.edges) {
        if (e.u < 0 || e.u >= graph.node_count || e.v < 0 || e.v >= graph.node_count)
            throw embed_error("maxcut: edge endpoint outside the node range");
        if (e.u == e.v) throw embed_error("maxcut: self loops are not representable");
        const auto it = edge_of_pair.find(pair_key(e.u, e.v));
        if (it == edge_of_pair.end())
            throw embed_error("maxcut: edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                              ") is not a fabric coupler and minor-embedding is unsupported");
        if (model.edge_enabled(it->second)) throw embed_error("maxcut: duplicate graph edge");
        model.set_edge_enabled(it->second, true);
        model.set_coupling_code(it->second, quantize(-e.w, wmax));
    }
    return model;
}

double cut_value(const Graph& graph, const SpinState& state) {
    if (state.size() < graph.node_count) throw shape_error("cut_value: state misses graph nodes");
    double cut = 0.0;
    for (const auto& e : graph.edges) {
        if (e.u >= state.size() || e.v >= state.size())
            throw shape_error("cut_value: edge endpoint outside the state");
        cut += e.w * (1 - state.m[e.u] * state.m[e.v]) / 2.0;
    }
    return cut;
}

std::int64_t cut_value_code_units(const IsingModel& model, const SpinState& state) {
    std::int64_t cut = 0;
    const auto& edges = model.topology().edges();
    for (int k = 0; k < model.edge_count(); ++k) {
        if (!model.edge_enabled(k)) continue;
        const int mm = state.m[edges[k].a] * state.m[edges[k].b];
        cut += static_cast<std::int64_t>(-model.coupling_code(k)) * ((1 - mm) / 2);
    }
    return cut;
}

std::int64_t coupling_energy_code_units(const IsingModel& model, const SpinState& state) {
    std::int64_t e = 0;
    const auto& edges = model.topology().edges();
    for (int k = 0; k < model.edge_count(); ++k) {
        if (!model.edge_enabled(k)) continue;
        e -= static_cast<std::int64_t>(model.coupling_code(k)) * state.m[edges[k].a] * state.m[edges[k].b];
    }
    return e;
}

std::int64_t total_weight_code_units(const IsingModel& model) {
    std::int64_t w = 0;
    for (int k = 0; k < model.edge_count(); ++k)
        if (model.edge_enabled(k)) w += -static_cast<std::int64_t>(model.coupling_code(k));
    return w;
}

namespace {

TargetDistribution uniform_over_rows(std::vector<int> designated, const std::vector<std::uint64_t>& rows) {
    TargetDistribution t;
    t.designated_nodes = std::move(designated);
    t.probs.assign(std::uint64_t{1} << t.designated_nodes.size(), 0.0);
    for (std::uint64_t r : rows) t.probs[r] = 1.0 / static_cast<double>(rows.size());
    return t;
}

} // namespace

TargetDistribution gate_targets(GateKind kind, std::vector<int> designated_nodes) {
    std::vector<std::uint64_t> rows;
    if (kind == GateKind::FullAdder) {
        if (designated_nodes.size() != 5)
            throw config_error("gate_targets: full adder needs 5 designated nodes");
        for (std::uint64_t a = 0; a <= 1; ++a)
            for (std::uint64_t b = 0; b <= 1; ++b)
                for (std::uint64_t c = 0; c <= 1; ++c) {
                    const std::uint64_t sum = a ^ b ^ c;
                    const std::uint64_t cout = (a + b + c) >= 2;
                    rows.push_back(a | (b << 1) | (c << 2) | (sum << 3) | (cout << 4));
                }
    } else {
        if (designated_nodes.size() != 3)
            throw config_error("gate_targets: two-input gates need 3 designated nodes");
        for (std::uint64_t a = 0; a <= 1; ++a)
            for (std::uint64_t b = 0; b <= 1; ++b) {
                std::uint64_t out = 0;
                switch (kind) {
                case GateKind::And: out = a & b; break;
                case GateKind::Or: out = a | b; break;
                case GateKind::Xor: out = a ^ b; break;
                default: break;
                }
                rows.push_back(a | (b << 1) | (out << 2));
            }
    }
    return uniform_over_rows(std::move(designated_nodes), rows);
}

TargetDistribution gate_targets(GateKind kind) {
    const int k = kind == GateKind::FullAdder ? 5 : 3;
    std::vector<int> nodes(k);
    for (int i = 0; i < k; ++i) nodes[i] = i;
    return gate_targets(kind, std::move(nodes));
}

namespace {

void check_budget(int n, const char* what) {
    if (n > kEnumerationBudget)
        throw budget_error(std::string(what) + ": " + std::to_string(n) +
                           " spins exceed the enumeration budget of " +
                           std::to_string(kEnumerationBudget));
}

} // namespace

GroundResult brute_force_ground(const IsingModel& model) {
    const int n = model.node_count();
    check_budget(n, "brute_force_ground");
    GroundResult best;
    const std::uint64_t states = std::uint64_t{1} << n;
    for (std::uint64_t idx = 0; idx < states; ++idx) {
        const SpinState s = state_from_index(idx, n);
        const double e = model.energy(s);
        if (idx == 0 || e < best.energy - 1e-9) {
            best.energy = e;
            best.degeneracy = 1;
            best.example = s;
        } else if (std::abs(e - best.energy) <= 1e-9) {
            ++best.degeneracy;
        }
    }
    return best;
}

MaxCutResult brute_force_maxcut(const Graph& graph) {
    check_budget(graph.node_count, "brute_force_maxcut");
    MaxCutResult best;
    const std::uint64_t states = std::uint64_t{1} << graph.node_count;
    for (std::uint64_t idx = 0; idx < states; ++idx) {
        const SpinState s = state_from_index(idx, graph.node_count);
        const double c = cut_value(graph, s);
        if (idx == 0 || c > best.cut) {
            best.cut = c;
            best.example = s;
        }
    }
    return best;
}

std::vector<double> brute_force_boltzmann(const IsingModel& model, double beta) {
    const int n = model.node_count();
    check_budget(n, "brute_force_boltzmann");
    const std::uint64_t states = std::uint64_t{1} << n;
    std::vector<double> log_w(states);
    double max_lw = -1e300;
    for (std::uint64_t idx = 0; idx < states; ++idx) {
        log_w[idx] = -beta * model.energy(state_from_index(idx, n));
        max_lw = std::max(max_lw, log_w[idx]);
    }
    double z = 0.0;
    for (double lw : log_w) z += std::exp(lw - max_lw);
    std::vector<double> probs(states);
    for (std::uint64_t idx = 0; idx < states; ++idx) probs[idx] = std::exp(log_w[idx] - max_lw) / z;
    return probs;
}

} // namespace pbit
