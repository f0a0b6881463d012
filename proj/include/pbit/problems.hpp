#pragma once

#include "pbit/learning.hpp"
#include "pbit/model.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace pbit {

struct WeightedEdge {
    int u = 0;
    int v = 0;
    double w = 0.0;
};

struct Graph {
    int node_count = 0;
    std::vector<WeightedEdge> edges;
};

// Max-Cut to Ising under E = -sum J m m: each graph edge becomes an
// antiferromagnetic coupling J = -w, normalized so max|w| hits full code
// scale before quantization (weight_scale = max|w|); h = 0; non-graph
// couplers disabled. Graph nodes are fabric nodes (identity placement);
// edges that are not fabric couplers are rejected.
IsingModel maxcut_encode(const Graph& graph, std::shared_ptr<const ChimeraTopology> topology);

// sum_(u,v,w) w (1 - m_u m_v) / 2.
double cut_value(const Graph& graph, const SpinState& state);

// Integer code-unit routes for the exact cut/energy identity
//   coupling_energy = total_weight - 2 * cut
// which holds in int64 arithmetic for every state (edge weight in code units
// is -coupling_code; disabled edges excluded throughout).
std::int64_t cut_value_code_units(const IsingModel& model, const SpinState& state);
std::int64_t coupling_energy_code_units(const IsingModel& model, const SpinState& state);
std::int64_t total_weight_code_units(const IsingModel& model);

enum class GateKind : std::uint8_t { And, Or, Xor, FullAdder };

// Uniform distribution over the valid truth-table rows. AND/OR/XOR are over
// (A, B, Out); the full adder over (A, B, Cin, Sum, Cout).
TargetDistribution gate_targets(GateKind kind, std::vector<int> designated_nodes);
TargetDistribution gate_targets(GateKind kind); // default node ids 0..k-1

// Exhaustive enumeration over 2^n states, n <= 24. State index bit k is node
// k's spin (1 <-> +1), matching the designated-pattern convention when the
// designated list is 0..n-1.
inline constexpr int kEnumerationBudget = 24;

struct GroundResult {
    double energy = 0.0;
    std::uint64_t degeneracy = 0; // states within 1e-9 of the minimum
    SpinState example;
};

GroundResult brute_force_ground(const IsingModel& model);

struct MaxCutResult {
    double cut = 0.0;
    SpinState example;
};

MaxCutResult brute_force_maxcut(const Graph& graph);

// Normalized Boltzmann probabilities exp(-beta E)/Z, log-sum-exp stabilized.
std::vector<double> brute_force_boltzmann(const IsingModel& model, double beta);

} // namespace pbit
