#pragma once

#include "pbit/topology.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace pbit {

// Weights and biases live as signed 8-bit codes, the resolution of the
// on-fabric DACs. The range is symmetric: [-127, +127]; -128 is never
// produced. A code dequantizes to code/127 * scale.
using WeightCode = std::int8_t;
inline constexpr int kCodeMax = 127;

// round(clamp(value/scale, -1, 1) * 127), round half away from zero.
WeightCode quantize(double value, double scale);

inline double dequantize(WeightCode code, double scale) {
    return static_cast<double>(code) / 127.0 * scale;
}

// Bipolar spins, one per fabric node.
struct SpinState {
    std::vector<std::int8_t> m; // entries are exactly -1 or +1

    int size() const { return static_cast<int>(m.size()); }
};

// Designated-node bit pattern: bit i is 1 iff the spin of designated[i] is +1.
std::uint64_t pattern_of(const SpinState& state, const std::vector<int>& designated);

// The Ising problem as the fabric sees it: one coupling code per undirected
// edge, one bias code per node, an enable bit per edge (setting a weight to
// zero does not remove a connection on the real chip, so connections carry an
// explicit enable), and the two externally set scale factors.
//
// Energy convention: E = -sum_enabled J_ij m_i m_j - sum_i h_i m_i with J, h
// dequantized. Used identically everywhere.
class IsingModel {
public:
    explicit IsingModel(std::shared_ptr<const ChimeraTopology> topology,
                        double weight_scale = 1.0, double bias_scale = 1.0);

    const ChimeraTopology& topology() const { return *topology_; }
    std::shared_ptr<const ChimeraTopology> topology_ptr() const { return topology_; }

    int node_count() const { return topology_->node_count(); }
    int edge_count() const { return topology_->edge_count(); }

    double weight_scale() const { return weight_scale_; }
    double bias_scale() const { return bias_scale_; }

    WeightCode coupling_code(int edge) const { return coupling_codes_[check_edge(edge)]; }
    void set_coupling_code(int edge, WeightCode code) { coupling_codes_[check_edge(edge)] = code; }

    bool edge_enabled(int edge) const { return enabled_[check_edge(edge)] != 0; }
    void set_edge_enabled(int edge, bool on) { enabled_[check_edge(edge)] = on ? 1 : 0; }

    WeightCode bias_code(int node) const { return bias_codes_[check_node(node)]; }
    void set_bias_code(int node, WeightCode code) { bias_codes_[check_node(node)] = code; }

    double coupling_value(int edge) const { return dequantize(coupling_code(edge), weight_scale_); }
    double bias_value(int node) const { return dequantize(bias_code(node), bias_scale_); }

    // Disabled edges contribute exactly zero regardless of their code.
    double energy(const SpinState& state) const;

private:
    std::shared_ptr<const ChimeraTopology> topology_;
    double weight_scale_;
    double bias_scale_;
    std::vector<WeightCode> coupling_codes_;
    std::vector<WeightCode> bias_codes_;
    std::vector<std::uint8_t> enabled_;

    int check_edge(int edge) const;
    int check_node(int node) const;
};

} // namespace pbit
