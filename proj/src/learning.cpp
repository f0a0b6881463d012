#include "pbit/learning.hpp"

#include "pbit/errors.hpp"
#include "pbit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace pbit {

void TargetDistribution::validate() const {
    if (designated_nodes.empty() || designated_nodes.size() > 24)
        throw config_error("target: designated node count must be in [1, 24]");
    if (probs.size() != (std::uint64_t{1} << designated_nodes.size()))
        throw shape_error("target: probability table size must be 2^k");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw config_error("target: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw config_error("target: probabilities must sum to 1");
}

void CdConfig::validate() const {
    if (!(learning_rate > 0)) throw config_error("cd: learning_rate must be positive");
    if (cd_k < 1) throw config_error("cd: cd_k must be >= 1");
    if (steps < 1) throw config_error("cd: steps must be >= 1");
    if (batch < 1) throw config_error("cd: batch must be >= 1");
    if (!(beta_train > 0)) throw config_error("cd: beta_train must be positive");
    if (positive_burn_in < 0 || positive_samples < 1)
        throw config_error("cd: positive-phase budgets invalid");
    if (eval_sweeps < 1 || eval_burn_in < 0) throw config_error("cd: eval budgets invalid");
}

double kl_divergence(const std::vector<double>& target_probs,
                     const std::vector<std::uint64_t>& histogram) {
    if (target_probs.size() != histogram.size())
        throw shape_error("kl: target and histogram cover different pattern spaces");
    std::uint64_t n = 0;
    for (std::uint64_t c : histogram) n += c;
    if (n == 0) throw config_error("kl: empty histogram");
    const double eps = 1.0 / (10.0 * static_cast<double>(n));
    const double denom = static_cast<double>(n) + eps * static_cast<double>(histogram.size());
    double kl = 0.0;
    for (std::size_t i = 0; i < target_probs.size(); ++i) {
        const double p = target_probs[i];
        if (p <= 0.0) continue;
        const double q = (static_cast<double>(histogram[i]) + eps) / denom;
        kl += p * std::log(p / q);
    }
    return std::max(kl, 0.0);
}

namespace {

constexpr std::uint64_t kSaltPatterns = 0x50415454; // "PATT"
constexpr std::uint64_t kSaltPositive = 0x504F5321; // "POS!"
constexpr std::uint64_t kSaltNegative = 0x4E454721; // "NEG!"
constexpr std::uint64_t kSaltEval = 0x4556414C;     // "EVAL"

std::uint64_t draw_pattern(const std::vector<double>& probs, SplitMix& rng) {
    const double u = rng.next_unit();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    // u can only land past the last nonzero bin through rounding
    for (std::size_t i = probs.size(); i-- > 0;)
        if (probs[i] > 0) return i;
    throw config_error("target: all-zero distribution");
}

struct MomentSums {
    std::vector<std::int64_t> node;
    std::vector<std::int64_t> edge;
    std::int64_t samples = 0;

    explicit MomentSums(const IsingModel& m) : node(m.node_count(), 0), edge(m.edge_count(), 0) {}

    void record(const IsingModel& m, const SpinState& s) {
        for (int i = 0; i < m.node_count(); ++i) node[i] += s.m[i];
        const auto& edges = m.topology().edges();
        for (int k = 0; k < m.edge_count(); ++k) edge[k] += s.m[edges[k].a] * s.m[edges[k].b];
        ++samples;
    }

    void add(const MomentSums& o) {
        for (std::size_t i = 0; i < node.size(); ++i) node[i] += o.node[i];
        for (std::size_t k = 0; k < edge.size(); ++k) edge[k] += o.edge[k];
        samples += o.samples;
    }

    PhaseStats means() const {
        PhaseStats out;
        const double n = samples > 0 ? static_cast<double>(samples) : 1.0;
        out.node_mean.resize(node.size());
        for (std::size_t i = 0; i < node.size(); ++i)
            out.node_mean[i] = static_cast<double>(node[i]) / n;
        out.edge_corr.resize(edge.size());
        for (std::size_t k = 0; k < edge.size(); ++k)
            out.edge_corr[k] = static_cast<double>(edge[k]) / n;
        return out;
    }
};

void check_designated(const IsingModel& model, const TargetDistribution& target) {
    target.validate();
    for (int d : target.designated_nodes)
        if (d < 0 || d >= model.node_count())
            throw std::out_of_range("target: designated node outside the topology");
}

// The designated nodes must sit in one connected component of the
// enabled-coupler graph, otherwise the hidden units cannot mediate their
// correlations and the target is unlearnable by construction.
void check_embeddable(const IsingModel& model, const TargetDistribution& target) {
    std::vector<int> parent(model.node_count());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    const auto& edges = model.topology().edges();
    for (int k = 0; k < model.edge_count(); ++k)
        if (model.edge_enabled(k)) parent[find(edges[k].a)] = find(edges[k].b);
    const int root = find(target.designated_nodes.front());
    for (int d : target.designated_nodes)
        if (find(d) != root)
            throw config_error("train: designated nodes lie in disconnected enabled components");
}

} // namespace

PositiveResult positive_phase(const IsingModel& model, const TargetDistribution& target,
                              const CdConfig& config, const HardwareProfile& profile,
                              std::uint64_t salt, int threads) {
    check_designated(model, target);
    config.validate();

    SplitMix pattern_rng(derive_seed(config.seed, kSaltPatterns, salt));
    std::vector<std::uint64_t> patterns(config.batch);
    for (int b = 0; b < config.batch; ++b) patterns[b] = draw_pattern(target.probs, pattern_rng);

    std::vector<MomentSums> partial(config.batch, MomentSums(model));
    PositiveResult out;
    out.final_states.resize(config.batch);

    parallel_for(config.batch, threads, [&](std::int64_t b) {
        ChainRunner runner(model, profile, config.beta_train, UpdateSchedule::SequentialFixed,
                           derive_seed(config.seed, kSaltPositive, salt * 1024 + b));
        for (std::size_t i = 0; i < target.designated_nodes.size(); ++i)
            runner.set_clamp(target.designated_nodes[i], (patterns[b] >> i) & 1 ? +1 : -1);
        runner.randomize_state();
        for (int t = 0; t < config.positive_burn_in; ++t) runner.sweep_once();
        for (int t = 0; t < config.positive_samples; ++t) {
            runner.sweep_once();
            partial[b].record(model, runner.state());
        }
        out.final_states[b] = runner.state();
    });

    MomentSums total(model);
    for (const auto& p : partial) total.add(p);
    out.stats = total.means();
    return out;
}

PhaseStats negative_phase(const IsingModel& model, const CdConfig& config,
                          const HardwareProfile& profile, std::uint64_t salt,
                          std::vector<SpinState>* init_states, int threads) {
    config.validate();
    if (init_states && static_cast<int>(init_states->size()) != config.batch)
        throw shape_error("negative_phase: init state count must equal the batch size");

    std::vector<MomentSums> partial(config.batch, MomentSums(model));

    parallel_for(config.batch, threads, [&](std::int64_t b) {
        ChainRunner runner(model, profile, config.beta_train, UpdateSchedule::SequentialFixed,
                           derive_seed(config.seed, kSaltNegative, salt * 1024 + b));
        if (init_states)
            runner.set_state((*init_states)[b]);
        else
            runner.randomize_state();
        for (int t = 0; t < config.cd_k; ++t) runner.sweep_once();
        partial[b].record(model, runner.state());
        if (init_states) (*init_states)[b] = runner.state();
    });

    MomentSums total(model);
    for (const auto& p : partial) total.add(p);
    return total.means();
}

IsingModel cd_update(const IsingModel& model, const PhaseStats& pos, const PhaseStats& neg,
                     const CdConfig& config) {
    if (pos.node_mean.size() != static_cast<std::size_t>(model.node_count()) ||
        neg.node_mean.size() != static_cast<std::size_t>(model.node_count()) ||
        pos.edge_corr.size() != static_cast<std::size_t>(model.edge_count()) ||
        neg.edge_corr.size() != static_cast<std::size_t>(model.edge_count()))
        throw shape_error("cd_update: phase statistics do not cover the model");

    IsingModel out = model;
    for (int k = 0; k < model.edge_count(); ++k) {
        if (!model.edge_enabled(k)) continue;
        const double j = dequantize(model.coupling_code(k), model.weight_scale()) +
                         config.learning_rate * (pos.edge_corr[k] - neg.edge_corr[k]);
        out.set_coupling_code(k, quantize(j, model.weight_scale()));
    }
    for (int i = 0; i < model.node_count(); ++i) {
        const double h = dequantize(model.bias_code(i), model.bias_scale()) +
                         config.learning_rate * (pos.node_mean[i] - neg.node_mean[i]);
        out.set_bias_code(i, quantize(h, model.bias_scale()));
    }
    return out;
}

TrainResult train(const IsingModel& initial, const TargetDistribution& target,
                  const CdConfig& config, const HardwareProfile& profile, int threads) {
    check_designated(initial, target);
    check_embeddable(initial, target);
    config.validate();

    TrainResult result{initial, {}};
    result.trace.reserve(config.steps);

    std::vector<SpinState> persistent;
    if (config.persistent) {
        persistent.resize(config.batch);
        for (int b = 0; b < config.batch; ++b)
            persistent[b] = random_state(initial.node_count(),
                                         derive_seed(config.seed, kSaltNegative, 0xFFFF0000u + b));
    }

    for (int step = 0; step < config.steps; ++step) {
        PositiveResult pos = positive_phase(result.model, target, config, profile, step, threads);
        std::vector<SpinState>* neg_init = config.persistent ? &persistent : &pos.final_states;
        const PhaseStats neg = negative_phase(result.model, config, profile, step, neg_init, threads);

        double corr_err = 0.0;
        int enabled = 0;
        for (int k = 0; k < result.model.edge_count(); ++k) {
            if (!result.model.edge_enabled(k)) continue;
            corr_err += std::abs(pos.stats.edge_corr[k] - neg.edge_corr[k]);
            ++enabled;
        }
        if (enabled > 0) corr_err /= enabled;

        result.model = cd_update(result.model, pos.stats, neg, config);

        SamplerConfig eval;
        eval.beta = config.beta_train;
        eval.schedule = UpdateSchedule::SequentialFixed;
        eval.sweeps = config.eval_burn_in + config.eval_sweeps;
        eval.burn_in = config.eval_burn_in;
        eval.seed = derive_seed(config.seed, kSaltEval, step);
        const ChainStats stats = run_chain(result.model, eval, profile, target.designated_nodes, threads);
        result.trace.push_back({step, kl_divergence(target.probs, stats.histogram), corr_err});
    }
    return result;
}

} // namespace pbit
