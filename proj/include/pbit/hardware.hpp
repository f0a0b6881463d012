#pragma once

#include "pbit/model.hpp"
#include "pbit/random.hpp"
#include "pbit/topology.hpp"

#include <cstdint>
#include <vector>

namespace pbit {

enum class RngSource : std::uint8_t { Ideal, Lfsr };

// Fibonacci LFSR tap specification. Taps are 1-based bit positions counted
// from the least significant bit; one shift computes feedback = xor of the
// tapped bits and moves it into bit 1: state' = ((state << 1) | fb) & mask.
// The default 32-bit polynomial {32,22,2,1} is maximal length (period 2^32-1
// over nonzero states); {16,15,13,4} is the maximal 16-bit test variant.
struct LfsrTaps {
    int width = 32;
    std::vector<int> taps = {32, 22, 2, 1};
};

// One shift register per unit cell; all-zeros is the lockup state and is
// rejected. A "step" advances a register by `width` single shifts (one whole
// word), so every sweep reads a fresh word. The stepped state sequence still
// has period 2^width - 1 because gcd(width, 2^width - 1) = 1.
class LfsrBank {
public:
    LfsrBank(int cells, std::uint64_t master_seed, LfsrTaps taps = LfsrTaps{});
    LfsrBank(std::vector<std::uint32_t> seeds, LfsrTaps taps = LfsrTaps{});

    int cells() const { return static_cast<int>(state_.size()); }
    const LfsrTaps& taps() const { return taps_; }
    std::uint32_t word(int cell) const { return state_[cell]; }

    std::uint32_t step_cell(int cell);
    void step_all();

    static std::uint32_t shift_once(std::uint32_t state, const LfsrTaps& taps);

private:
    LfsrTaps taps_;
    std::uint32_t mask_;
    std::vector<std::uint32_t> state_;

    void validate_taps() const;
};

std::uint8_t reverse_bits8(std::uint8_t v);

// Randomness for one node from its cell's current word. The word splits into
// four 8-bit lanes, lane = index_in_shore, lane k occupying bits [8k, 8k+8).
// Vertical-shore nodes read their lane as-is, horizontal-shore nodes read it
// bit-reversed (one 32-bit register serves all eight nodes of a cell). The
// top dac_bits of the lane map affinely onto [-1, 1]: with d bits and level
// u, r = (u - (2^(d-1) - 0.5)) / (2^(d-1) - 0.5) -- 2^d evenly spaced values,
// symmetric about zero, no exact zero.
double rand_for_node(const LfsrBank& bank, const ChimeraTopology& topology, int node, int dac_bits = 8);

struct HardwareProfile {
    RngSource rng_source = RngSource::Ideal;
    int dac_bits = 8;
    double gain_sigma = 0.0;   // log-normal spread of the per-node effective beta
    double offset_sigma = 0.0; // normal spread of the per-node input offset, field units
    std::uint64_t mismatch_seed = 0;
};

// Per-node analog mismatch, frozen at construction: gain g ~ LogNormal(0,
// gain_sigma) multiplies beta, offset o ~ Normal(0, offset_sigma) adds to the
// input field. A pure function of (mismatch_seed, node_count); zero sigmas
// give the exact identity.
class MismatchTable {
public:
    MismatchTable(const HardwareProfile& profile, int node_count);

    double gain(int node) const { return gain_[node]; }
    double offset(int node) const { return offset_[node]; }
    int size() const { return static_cast<int>(gain_.size()); }

private:
    std::vector<double> gain_;
    std::vector<double> offset_;
};

struct EffectiveInput {
    double beta_eff = 0.0;
    double field_eff = 0.0;
};

inline EffectiveInput apply_mismatch(const MismatchTable& table, int node, double beta, double field) {
    return {beta * table.gain(node), field + table.offset(node)};
}

// Software replica of the on-chip mismatch measurement: sweep the bias code
// of an isolated node, record the sample mean per code, fit
// <m> = tanh(beta_eff * (h + offset)).
struct BiasSweepPoint {
    WeightCode code = 0;
    double mean_spin = 0.0;
};

struct TanhFit {
    double beta_eff = 0.0;
    double offset = 0.0;
    bool ok = false;
};

struct NodeCharacterization {
    int node = 0;
    std::vector<BiasSweepPoint> points;
    TanhFit fit;
};

// Weighted least squares on atanh(<m>) vs the dequantized bias; saturated
// points (|<m>| > 0.995) are excluded, fewer than two usable distinct biases
// or a non-positive slope reports fit failure.
TanhFit fit_tanh_response(const std::vector<double>& bias_values, const std::vector<double>& mean_spins);

// Every edge of `node` must be disabled in the template model. The chain is
// simulated for the single node only (an isolated p-bit's updates do not
// depend on the rest of the fabric); in LFSR mode only the node's own cell
// register advances, which reproduces the full-fabric lane sequence.
NodeCharacterization bias_sweep_characterize(const IsingModel& model_template, int node,
                                             const std::vector<WeightCode>& codes, double beta,
                                             std::int64_t sweeps_per_code,
                                             const HardwareProfile& profile, std::uint64_t seed);

} // namespace pbit
