#include "pbit/hardware.hpp"

#include "pbit/errors.hpp"
#include "pbit/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pbit {

LfsrBank::LfsrBank(int cells, std::uint64_t master_seed, LfsrTaps taps) : taps_(std::move(taps)) {
    validate_taps();
    mask_ = taps_.width == 32 ? 0xFFFFFFFFu : ((1u << taps_.width) - 1u);
    state_.resize(cells);
    for (int c = 0; c < cells; ++c) {
        std::uint32_t s = static_cast<std::uint32_t>(derive_seed(master_seed, kSaltLfsrBank, c)) & mask_;
        if (s == 0) s = 1; // derived seeds must avoid the lockup state
        state_[c] = s;
    }
}

LfsrBank::LfsrBank(std::vector<std::uint32_t> seeds, LfsrTaps taps)
    : taps_(std::move(taps)), state_(std::move(seeds)) {
    validate_taps();
    mask_ = taps_.width == 32 ? 0xFFFFFFFFu : ((1u << taps_.width) - 1u);
    for (std::uint32_t s : state_) {
        if (s == 0) throw config_error("lfsr: zero seed would lock the register");
        if ((s & ~mask_) != 0) throw config_error("lfsr: seed wider than the register");
    }
}

void LfsrBank::validate_taps() const {
    if (taps_.width < 2 || taps_.width > 32) throw config_error("lfsr: width must be in [2, 32]");
    if (taps_.taps.empty()) throw config_error("lfsr: empty tap list");
    int max_tap = 0;
    for (int t : taps_.taps) {
        if (t < 1 || t > taps_.width) throw config_error("lfsr: tap outside [1, width]");
        max_tap = std::max(max_tap, t);
    }
    if (max_tap != taps_.width) throw config_error("lfsr: polynomial degree must equal the width");
}

std::uint32_t LfsrBank::shift_once(std::uint32_t state, const LfsrTaps& taps) {
    std::uint32_t fb = 0;
    for (int t : taps.taps) fb ^= (state >> (t - 1)) & 1u;
    const std::uint32_t mask = taps.width == 32 ? 0xFFFFFFFFu : ((1u << taps.width) - 1u);
    return ((state << 1) | fb) & mask;
}

std::uint32_t LfsrBank::step_cell(int cell) {
    if (cell < 0 || cell >= cells()) throw std::out_of_range("lfsr: cell index out of range");
    std::uint32_t s = state_[cell];
    for (int i = 0; i < taps_.width; ++i) s = shift_once(s, taps_);
    state_[cell] = s;
    return s;
}

void LfsrBank::step_all() {
    for (int c = 0; c < cells(); ++c) step_cell(c);
}

std::uint8_t reverse_bits8(std::uint8_t v) {
    v = static_cast<std::uint8_t>(((v & 0xF0u) >> 4) | ((v & 0x0Fu) << 4));
    v = static_cast<std::uint8_t>(((v & 0xCCu) >> 2) | ((v & 0x33u) << 2));
    v = static_cast<std::uint8_t>(((v & 0xAAu) >> 1) | ((v & 0x55u) << 1));
    return v;
}

namespace {

double lane_to_real(std::uint8_t byte, bool reversed, int dac_bits) {
    if (reversed) byte = reverse_bits8(byte);
    const std::uint32_t u = byte >> (8 - dac_bits);
    const double half = static_cast<double>(1u << (dac_bits - 1)) - 0.5;
    return (static_cast<double>(u) - half) / half;
}

} // namespace

double rand_for_node(const LfsrBank& bank, const ChimeraTopology& topology, int node, int dac_bits) {
    if (dac_bits < 1 || dac_bits > 8) throw config_error("rand_for_node: dac_bits must be in [1, 8]");
    const NodeId id = topology.structured(node);
    if (id.index_in_shore > 3)
        throw config_error("rand_for_node: one 32-bit register serves at most 4 lanes per shore");
    const std::uint32_t word = bank.word(topology.cell_index_of(node));
    const auto byte = static_cast<std::uint8_t>((word >> (8 * id.index_in_shore)) & 0xFFu);
    return lane_to_real(byte, id.shore == Shore::Horizontal, dac_bits);
}

MismatchTable::MismatchTable(const HardwareProfile& profile, int node_count) {
    if (profile.gain_sigma < 0 || profile.offset_sigma < 0)
        throw config_error("mismatch: sigmas must be non-negative");
    gain_.resize(node_count);
    offset_.resize(node_count);
    SplitMix rng(derive_seed(profile.mismatch_seed, 0x4D49534D)); // "MISM"
    for (int i = 0; i < node_count; ++i) {
        double zg, zo;
        rng.next_normal_pair(zg, zo);
        gain_[i] = profile.gain_sigma == 0.0 ? 1.0 : std::exp(profile.gain_sigma * zg);
        offset_[i] = profile.offset_sigma * zo;
    }
}

TanhFit fit_tanh_response(const std::vector<double>& bias_values, const std::vector<double>& mean_spins) {
    if (bias_values.size() != mean_spins.size())
        throw shape_error("fit_tanh_response: mismatched point counts");
    // atanh(<m>) = beta_eff * h + beta_eff * offset; weighted least squares
    // with w = 1 - <m>^2 (inverse delta-method variance up to the common 1/N).
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    double x_min = 0, x_max = 0;
    bool any = false;
    for (std::size_t k = 0; k < bias_values.size(); ++k) {
        const double y = mean_spins[k];
        if (std::abs(y) > 0.995) continue; // saturated, atanh noise explodes
        const double x = bias_values[k];
        const double a = std::atanh(y);
        const double w = 1.0 - y * y;
        sw += w;
        sx += w * x;
        sy += w * a;
        sxx += w * x * x;
        sxy += w * x * a;
        if (!any || x < x_min) x_min = x;
        if (!any || x > x_max) x_max = x;
        any = true;
    }
    TanhFit fit;
    if (!any || x_max - x_min < 1e-12) return fit; // degenerate sweep
    const double det = sw * sxx - sx * sx;
    if (det <= 0) return fit;
    const double slope = (sw * sxy - sx * sy) / det;
    const double intercept = (sxx * sy - sx * sxy) / det;
    if (!(slope > 0) || !std::isfinite(slope) || !std::isfinite(intercept)) return fit;
    fit.beta_eff = slope;
    fit.offset = intercept / slope;
    fit.ok = true;
    return fit;
}

NodeCharacterization bias_sweep_characterize(const IsingModel& model_template, int node,
                                             const std::vector<WeightCode>& codes, double beta,
                                             std::int64_t sweeps_per_code,
                                             const HardwareProfile& profile, std::uint64_t seed) {
    const ChimeraTopology& topo = model_template.topology();
    for (const auto& nb : topo.neighbors(node))
        if (model_template.edge_enabled(nb.edge))
            throw config_error("characterize: node " + std::to_string(node) +
                               " still has enabled couplers; it must be isolated");
    if (sweeps_per_code < 1) throw config_error("characterize: empty sweep budget");

    const MismatchTable mismatch(profile, topo.node_count());
    const double beta_eff = beta * mismatch.gain(node);
    const int cell = topo.cell_index_of(node);

    NodeCharacterization out;
    out.node = node;
    std::vector<double> biases, means;
    for (std::size_t ci = 0; ci < codes.size(); ++ci) {
        const double h = dequantize(codes[ci], model_template.bias_scale());
        const double field = h + mismatch.offset(node);
        // An isolated p-bit has no state memory: each update depends only on
        // its own draw, so the per-code chain is just sweeps_per_code draws.
        std::int64_t sum = 0;
        if (profile.rng_source == RngSource::Ideal) {
            SplitMix stream(derive_seed(seed, kSaltNodeStream, node));
            for (std::int64_t t = 0; t < sweeps_per_code; ++t)
                sum += pbit_update(field, beta_eff, stream.next_pm1());
        } else {
            LfsrBank bank(topo.enabled_cell_count(), seed);
            for (std::int64_t t = 0; t < sweeps_per_code; ++t) {
                bank.step_cell(cell);
                sum += pbit_update(field, beta_eff, rand_for_node(bank, topo, node, profile.dac_bits));
            }
        }
        const double mean = static_cast<double>(sum) / static_cast<double>(sweeps_per_code);
        out.points.push_back({codes[ci], mean});
        biases.push_back(h);
        means.push_back(mean);
    }
    out.fit = fit_tanh_response(biases, means);
    return out;
}

} // namespace pbit
