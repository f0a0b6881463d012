#pragma once

#include "pbit/hardware.hpp"
#include "pbit/model.hpp"
#include "pbit/random.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace pbit {

// A p-bit update evaluates I_i = sum_j J_ij m_j + h_i over enabled couplers
// and then m_i = sgn(tanh(beta I_i) + r) with r uniform on [-1, 1). Ties
// (tanh + r == 0) resolve to +1 so quantized-randomness runs stay
// reproducible. Hence P(m = +1 | I) = (1 + tanh(beta I)) / 2 for ideal r.

double local_field(const IsingModel& model, const SpinState& state, int node);

inline int pbit_update(double field, double beta, double r) {
    return (std::tanh(beta * field) + r >= 0.0) ? +1 : -1;
}

enum class UpdateSchedule : std::uint8_t {
    SequentialFixed,             // node-id order, freshest neighbor values
    SequentialRandomPermutation, // fresh permutation per sweep
    Chromatic                    // color class A then B; classes are update-order free
};

struct SamplerConfig {
    double beta = 1.0;
    UpdateSchedule schedule = UpdateSchedule::SequentialFixed;
    std::int64_t sweeps = 0;
    std::int64_t burn_in = 0; // must stay below sweeps
    std::uint64_t seed = 0;
};

struct ChainStats {
    std::vector<double> mean_spin;        // per node, post burn-in
    std::vector<double> pair_correlation; // per edge id, post burn-in
    std::vector<int> designated_nodes;
    std::vector<std::uint64_t> histogram; // 2^k bins; bit i of the bin index = designated_nodes[i]
    std::vector<double> energy_trace;     // per sweep, burn-in included
};

// Per-node randomness with a fixed assignment: in ideal mode every node owns
// a SplitMix stream (draws consumed only by that node's updates), in LFSR
// mode every cell's register advances once per sweep and a draw is a pure
// read of the node's lane. Either way the values a node sees are independent
// of update order, clamping of other nodes, and worker count.
class NodeRandSource {
public:
    NodeRandSource(const ChimeraTopology& topology, const HardwareProfile& profile, std::uint64_t seed);

    void begin_sweep();
    double draw(int node);

private:
    RngSource mode_;
    int dac_bits_;
    std::vector<std::uint64_t> stream_;
    LfsrBank bank_;
    const ChimeraTopology* topology_;
};

// One Gibbs chain over one state vector. Beta can change between sweeps
// (annealing); clamped nodes never update and never consume randomness.
class ChainRunner {
public:
    ChainRunner(const IsingModel& model, const HardwareProfile& profile, double beta,
                UpdateSchedule schedule, std::uint64_t seed);

    const SpinState& state() const { return state_; }
    void set_state(const SpinState& state);
    void randomize_state();

    void set_beta(double beta) { beta_ = beta; }
    double beta() const { return beta_; }

    void set_clamp(int node, int spin); // spin must be -1 or +1
    void clear_clamps();

    // threads only matters for the chromatic schedule, where each color class
    // may be partitioned across workers; results are thread-count invariant.
    void sweep_once(int threads = 1);

    double energy() const { return model_->energy(state_); }
    const IsingModel& model() const { return *model_; }

private:
    const IsingModel* model_;
    double beta_;
    UpdateSchedule schedule_;
    NodeRandSource rand_;
    MismatchTable mismatch_;
    SplitMix scheduler_rng_;
    SplitMix init_rng_;
    SpinState state_;
    std::vector<std::int8_t> clamp_; // 0 free, otherwise the forced spin
    std::vector<int> order_;         // scratch for the permutation schedule
    std::vector<int> color_nodes_[2];

    void update_node(int node);
};

// Moment accumulation over recorded states. Sums are integer, so results are
// exact and independent of any parallel partitioning upstream.
class StatsAccumulator {
public:
    StatsAccumulator(const IsingModel& model, std::vector<int> designated);

    void record(const SpinState& state);

    std::uint64_t samples() const { return samples_; }
    const std::vector<std::int64_t>& node_sums() const { return node_sum_; }
    const std::vector<std::int64_t>& edge_sums() const { return edge_sum_; }

    ChainStats finalize(std::vector<double> energy_trace) const;

private:
    const IsingModel* model_;
    std::vector<int> designated_;
    std::vector<std::int64_t> node_sum_;
    std::vector<std::int64_t> edge_sum_;
    std::vector<std::uint64_t> histogram_;
    std::uint64_t samples_ = 0;
};

SpinState random_state(int node_count, std::uint64_t seed);

using ClampList = std::vector<std::pair<int, int>>; // (node, spin)

ChainStats run_chain(const IsingModel& model, const SamplerConfig& config,
                     const HardwareProfile& profile, const std::vector<int>& designated_nodes,
                     int threads = 1);

ChainStats clamped_run(const IsingModel& model, const SamplerConfig& config,
                       const HardwareProfile& profile, const ClampList& clamps,
                       const std::vector<int>& designated_nodes, int threads = 1);

} // namespace pbit
