#include "pbit/model.hpp"

#include "pbit/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace pbit {

WeightCode quantize(double value, double scale) {
    if (!std::isfinite(value)) throw config_error("quantize: value is not finite");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw config_error("quantize: scale must be positive");
    const double unit = std::max(-1.0, std::min(1.0, value / scale));
    return static_cast<WeightCode>(std::round(unit * kCodeMax));
}

std::uint64_t pattern_of(const SpinState& state, const std::vector<int>& designated) {
    std::uint64_t pattern = 0;
    for (std::size_t i = 0; i < designated.size(); ++i)
        if (state.m[designated[i]] > 0) pattern |= std::uint64_t{1} << i;
    return pattern;
}

IsingModel::IsingModel(std::shared_ptr<const ChimeraTopology> topology,
                       double weight_scale, double bias_scale)
    : topology_(std::move(topology)), weight_scale_(weight_scale), bias_scale_(bias_scale) {
    if (!topology_) throw config_error("model: null topology");
    if (!(weight_scale_ > 0.0) || !(bias_scale_ > 0.0))
        throw config_error("model: scales must be positive");
    coupling_codes_.assign(topology_->edge_count(), 0);
    bias_codes_.assign(topology_->node_count(), 0);
    enabled_.assign(topology_->edge_count(), 1);
}

double IsingModel::energy(const SpinState& state) const {
    if (state.size() != node_count())
        throw shape_error("energy: state length does not match the topology");
    double e = 0.0;
    const auto& edges = topology_->edges();
    for (int k = 0; k < edge_count(); ++k) {
        if (!enabled_[k]) continue;
        e -= coupling_value(k) * state.m[edges[k].a] * state.m[edges[k].b];
    }
    for (int i = 0; i < node_count(); ++i) e -= bias_value(i) * state.m[i];
    return e;
}

int IsingModel::check_edge(int edge) const {
    if (edge < 0 || edge >= edge_count()) throw std::out_of_range("model: edge id out of range");
    return edge;
}

int IsingModel::check_node(int node) const {
    if (node < 0 || node >= node_count()) throw std::out_of_range("model: node id out of range");
    return node;
}

} // namespace pbit
