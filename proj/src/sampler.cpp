#include "pbit/sampler.hpp"

#include "pbit/errors.hpp"
#include "pbit/parallel.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace pbit {

double local_field(const IsingModel& model, const SpinState& state, int node) {
    double acc = model.bias_value(node);
    for (const auto& nb : model.topology().neighbors(node))
        if (model.edge_enabled(nb.edge)) acc += model.coupling_value(nb.edge) * state.m[nb.node];
    return acc;
}

NodeRandSource::NodeRandSource(const ChimeraTopology& topology, const HardwareProfile& profile,
                               std::uint64_t seed)
    : mode_(profile.rng_source),
      dac_bits_(profile.dac_bits),
      bank_(mode_ == RngSource::Lfsr ? topology.enabled_cell_count() : 0, seed),
      topology_(&topology) {
    if (mode_ == RngSource::Ideal) {
        stream_.resize(topology.node_count());
        for (int i = 0; i < topology.node_count(); ++i)
            stream_[i] = derive_seed(seed, kSaltNodeStream, i);
    }
}

void NodeRandSource::begin_sweep() {
    if (mode_ == RngSource::Lfsr) bank_.step_all();
}

double NodeRandSource::draw(int node) {
    if (mode_ == RngSource::Ideal) return 2.0 * u64_to_unit(splitmix64(stream_[node])) - 1.0;
    return rand_for_node(bank_, *topology_, node, dac_bits_);
}

ChainRunner::ChainRunner(const IsingModel& model, const HardwareProfile& profile, double beta,
                         UpdateSchedule schedule, std::uint64_t seed)
    : model_(&model),
      beta_(beta),
      schedule_(schedule),
      rand_(model.topology(), profile, seed),
      mismatch_(profile, model.node_count()),
      scheduler_rng_(derive_seed(seed, kSaltScheduler)),
      init_rng_(derive_seed(seed, kSaltInitState)) {
    const int n = model.node_count();
    state_.m.assign(n, 1);
    clamp_.assign(n, 0);
    if (schedule_ == UpdateSchedule::SequentialRandomPermutation) {
        order_.resize(n);
        std::iota(order_.begin(), order_.end(), 0);
    }
    if (schedule_ == UpdateSchedule::Chromatic) {
        for (int i = 0; i < n; ++i)
            color_nodes_[static_cast<int>(model.topology().color_of(i))].push_back(i);
    }
}

void ChainRunner::set_state(const SpinState& state) {
    if (state.size() != model_->node_count()) throw shape_error("chain: state length mismatch");
    for (std::int8_t s : state.m)
        if (s != 1 && s != -1) throw config_error("chain: spins must be -1 or +1");
    state_ = state;
    for (int i = 0; i < model_->node_count(); ++i)
        if (clamp_[i] != 0) state_.m[i] = clamp_[i];
}

void ChainRunner::randomize_state() {
    for (int i = 0; i < model_->node_count(); ++i)
        state_.m[i] = clamp_[i] != 0 ? clamp_[i] : static_cast<std::int8_t>(init_rng_.next_sign());
}

void ChainRunner::set_clamp(int node, int spin) {
    if (node < 0 || node >= model_->node_count()) throw std::out_of_range("chain: clamp on nonexistent node");
    if (spin != 1 && spin != -1) throw config_error("chain: clamp spin must be -1 or +1");
    clamp_[node] = static_cast<std::int8_t>(spin);
    state_.m[node] = static_cast<std::int8_t>(spin);
}

void ChainRunner::clear_clamps() {
    std::fill(clamp_.begin(), clamp_.end(), 0);
}

void ChainRunner::update_node(int node) {
    if (clamp_[node] != 0) return;
    const double field = local_field(*model_, state_, node);
    const auto eff = apply_mismatch(mismatch_, node, beta_, field);
    state_.m[node] = static_cast<std::int8_t>(pbit_update(eff.field_eff, eff.beta_eff, rand_.draw(node)));
}

void ChainRunner::sweep_once(int threads) {
    rand_.begin_sweep();
    const int n = model_->node_count();
    switch (schedule_) {
    case UpdateSchedule::SequentialFixed:
        for (int i = 0; i < n; ++i) update_node(i);
        break;
    case UpdateSchedule::SequentialRandomPermutation:
        for (int i = n - 1; i > 0; --i)
            std::swap(order_[i], order_[scheduler_rng_.next_below(static_cast<std::uint64_t>(i) + 1)]);
        for (int i : order_) update_node(i);
        break;
    case UpdateSchedule::Chromatic:
        // A color class has no internal edges, so its members read only
        // other-color spins: updating them in parallel from the pre-half-sweep
        // state equals any sequential order.
        for (const auto& nodes : color_nodes_) {
            if (threads > 1 && static_cast<int>(nodes.size()) > 1) {
                parallel_for(static_cast<std::int64_t>(nodes.size()), threads,
                             [&](std::int64_t k) { update_node(nodes[k]); });
            } else {
                for (int i : nodes) update_node(i);
            }
        }
        break;
    }
}

StatsAccumulator::StatsAccumulator(const IsingModel& model, std::vector<int> designated)
    : model_(&model), designated_(std::move(designated)) {
    for (int d : designated_)
        if (d < 0 || d >= model.node_count())
            throw std::out_of_range("stats: designated node out of range");
    if (designated_.size() > 24) throw budget_error("stats: more than 24 designated nodes");
    node_sum_.assign(model.node_count(), 0);
    edge_sum_.assign(model.edge_count(), 0);
    histogram_.assign(std::uint64_t{1} << designated_.size(), 0);
}

void StatsAccumulator::record(const SpinState& state) {
    for (int i = 0; i < model_->node_count(); ++i) node_sum_[i] += state.m[i];
    const auto& edges = model_->topology().edges();
    for (int k = 0; k < model_->edge_count(); ++k)
        edge_sum_[k] += state.m[edges[k].a] * state.m[edges[k].b];
    ++histogram_[pattern_of(state, designated_)];
    ++samples_;
}

ChainStats StatsAccumulator::finalize(std::vector<double> energy_trace) const {
    ChainStats stats;
    const double n = samples_ > 0 ? static_cast<double>(samples_) : 1.0;
    stats.mean_spin.resize(node_sum_.size());
    for (std::size_t i = 0; i < node_sum_.size(); ++i)
        stats.mean_spin[i] = static_cast<double>(node_sum_[i]) / n;
    stats.pair_correlation.resize(edge_sum_.size());
    for (std::size_t k = 0; k < edge_sum_.size(); ++k)
        stats.pair_correlation[k] = static_cast<double>(edge_sum_[k]) / n;
    stats.designated_nodes = designated_;
    stats.histogram = histogram_;
    stats.energy_trace = std::move(energy_trace);
    return stats;
}

SpinState random_state(int node_count, std::uint64_t seed) {
    SplitMix rng(seed);
    SpinState s;
    s.m.resize(node_count);
    for (int i = 0; i < node_count; ++i) s.m[i] = static_cast<std::int8_t>(rng.next_sign());
    return s;
}

namespace {

void validate_config(const SamplerConfig& config) {
    if (config.sweeps < 1) throw config_error("sampler: empty sweep budget");
    if (config.burn_in < 0 || config.burn_in >= config.sweeps)
        throw config_error("sampler: burn_in must lie in [0, sweeps)");
    if (!(config.beta > 0)) throw config_error("sampler: beta must be positive");
}

ChainStats run_impl(const IsingModel& model, const SamplerConfig& config,
                    const HardwareProfile& profile, const ClampList& clamps,
                    const std::vector<int>& designated, int threads) {
    validate_config(config);
    ChainRunner runner(model, profile, config.beta, config.schedule, config.seed);
    for (const auto& [node, spin] : clamps) runner.set_clamp(node, spin);
    runner.randomize_state();
    StatsAccumulator acc(model, designated);
    std::vector<double> energy_trace;
    energy_trace.reserve(static_cast<std::size_t>(config.sweeps));
    for (std::int64_t t = 0; t < config.sweeps; ++t) {
        runner.sweep_once(threads);
        energy_trace.push_back(runner.energy());
        if (t >= config.burn_in) acc.record(runner.state());
    }
    return acc.finalize(std::move(energy_trace));
}

} // namespace

ChainStats run_chain(const IsingModel& model, const SamplerConfig& config,
                     const HardwareProfile& profile, const std::vector<int>& designated_nodes,
                     int threads) {
    return run_impl(model, config, profile, {}, designated_nodes, threads);
}

ChainStats clamped_run(const IsingModel& model, const SamplerConfig& config,
                       const HardwareProfile& profile, const ClampList& clamps,
                       const std::vector<int>& designated_nodes, int threads) {
    return run_impl(model, config, profile, clamps, designated_nodes, threads);
}

} // namespace pbit
