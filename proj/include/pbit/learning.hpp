#pragma once

#include "pbit/sampler.hpp"

#include <cstdint>
#include <vector>

namespace pbit {

// Bit convention everywhere: bit 1 <-> spin +1, bit 0 <-> spin -1. Pattern
// index bit i corresponds to designated_nodes[i].
struct TargetDistribution {
    std::vector<int> designated_nodes;
    std::vector<double> probs; // size 2^k

    // probs non-negative and summing to 1 within 1e-12, size matching k.
    void validate() const;
};

struct CdConfig {
    double learning_rate = 0.05;
    int cd_k = 5;       // negative-phase sweeps per batch sample
    int steps = 600;
    int batch = 32;
    double beta_train = 2.0;
    std::uint64_t seed = 1;
    bool persistent = false; // reuse negative-chain states across steps

    // Sampling budgets around the two phases and the per-step evaluation run.
    int positive_burn_in = 5;
    int positive_samples = 5;
    std::int64_t eval_sweeps = 3000;
    std::int64_t eval_burn_in = 300;

    void validate() const;
};

struct PhaseStats {
    std::vector<double> node_mean; // <m_i>, per node
    std::vector<double> edge_corr; // <m_i m_j>, per edge id
};

struct PositiveResult {
    PhaseStats stats;
    std::vector<SpinState> final_states; // one per batch item, seeds the negative chains
};

struct LearningTraceRow {
    int step = 0;
    double kl = 0.0;
    double mean_abs_corr_error = 0.0;
};

struct TrainResult {
    IsingModel model;
    std::vector<LearningTraceRow> trace;
};

// KL(target || empirical) in nats with additive smoothing eps = 1/(10 N) on
// the empirical side; 0 iff the distributions agree after smoothing.
double kl_divergence(const std::vector<double>& target_probs,
                     const std::vector<std::uint64_t>& histogram);

// Data phase: draw patterns from the target, clamp the designated nodes, let
// the hidden units relax, accumulate <m_i> and <m_i m_j> over the batch.
PositiveResult positive_phase(const IsingModel& model, const TargetDistribution& target,
                              const CdConfig& config, const HardwareProfile& profile,
                              std::uint64_t salt, int threads = 1);

// Model phase: cd_k free-running sweeps per batch sample, statistics from the
// final state. init_states (usually the positive-phase endpoints, or the
// persistent chain slots) may be null, in which case chains start random.
PhaseStats negative_phase(const IsingModel& model, const CdConfig& config,
                          const HardwareProfile& profile, std::uint64_t salt,
                          std::vector<SpinState>* init_states, int threads = 1);

// dJ = lr (<mm>_data - <mm>_model), dh = lr (<m>_data - <m>_model), applied in
// real units and re-quantized with the saturating 8-bit clip. Both phases run
// through the same hardware profile, which is what makes the training
// hardware-aware: whatever mismatch distorted the samples is compensated in
// the learned codes.
IsingModel cd_update(const IsingModel& model, const PhaseStats& pos, const PhaseStats& neg,
                     const CdConfig& config);

TrainResult train(const IsingModel& initial, const TargetDistribution& target,
                  const CdConfig& config, const HardwareProfile& profile, int threads = 1);

} // namespace pbit
