#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "pbit/anneal.hpp"
#include "pbit/errors.hpp"
#include "pbit/problems.hpp"
#include "pbit/random.hpp"
#include "pbit/sampler.hpp"

#include <cmath>
#include <memory>

using namespace pbit;

namespace {

std::shared_ptr<const ChimeraTopology> one_cell() {
    return std::make_shared<const ChimeraTopology>(1, 1, 4);
}

IsingModel random_model(std::shared_ptr<const ChimeraTopology> topo, std::uint64_t seed,
                        bool with_bias = true) {
    IsingModel model(std::move(topo));
    SplitMix rng(seed);
    for (int k = 0; k < model.edge_count(); ++k)
        model.set_coupling_code(k, static_cast<WeightCode>(static_cast<int>(rng.next_below(255)) - 127));
    if (with_bias)
        for (int i = 0; i < model.node_count(); ++i)
            model.set_bias_code(i, static_cast<WeightCode>(static_cast<int>(rng.next_below(255)) - 127));
    return model;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
    return d / 2.0;
}

std::vector<double> empirical(const ChainStats& stats) {
    std::uint64_t n = 0;
    for (std::uint64_t c : stats.histogram) n += c;
    std::vector<double> p(stats.histogram.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = static_cast<double>(stats.histogram[i]) / static_cast<double>(n);
    return p;
}

std::vector<int> all_nodes(int n) {
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = i;
    return v;
}

} // namespace

TEST_CASE("pbit_update") {
    SUBCASE("zero field is a fair coin") {
        CHECK(pbit_update(0.0, 1.0, 0.0) == 1);  // tie resolves to +1
        CHECK(pbit_update(0.0, 1.0, -0.1) == -1);
        CHECK(pbit_update(0.0, 1.0, 0.1) == 1);
        SplitMix rng(123);
        std::int64_t sum = 0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) sum += pbit_update(0.0, 1.0, rng.next_pm1());
        CHECK(std::abs(sum) < 4 * std::sqrt(static_cast<double>(n)));
    }

    SUBCASE("saturation") {
        SplitMix rng(9);
        for (int i = 0; i < 1000; ++i) {
            CHECK(pbit_update(1e6, 1.0, rng.next_pm1()) == 1);
            CHECK(pbit_update(-1e6, 1.0, rng.next_pm1()) == -1);
        }
    }

    SUBCASE("activation law at beta=1, I=0.5") {
        SplitMix rng(2024);
        const int n = 1000000;
        std::int64_t plus = 0;
        for (int i = 0; i < n; ++i)
            if (pbit_update(0.5, 1.0, rng.next_pm1()) == 1) ++plus;
        const double p = (1.0 + std::tanh(0.5)) / 2.0; // 0.73106...
        const double sigma = std::sqrt(p * (1 - p) / n);
        CHECK(std::abs(static_cast<double>(plus) / n - p) < 3 * sigma);
    }
}

TEST_CASE("local_field") {
    auto topo = one_cell();

    SUBCASE("isolated node reads its bias") {
        IsingModel model(topo);
        for (int k = 0; k < model.edge_count(); ++k) model.set_edge_enabled(k, false);
        model.set_bias_code(0, 127);
        SpinState s;
        s.m.assign(8, -1);
        CHECK(local_field(model, s, 0) == doctest::Approx(1.0));
    }

    SUBCASE("one enabled edge") {
        IsingModel model(topo);
        for (int k = 0; k < model.edge_count(); ++k) model.set_edge_enabled(k, false);
        model.set_edge_enabled(0, true); // nodes 0 and 4
        model.set_coupling_code(0, 127);
        SpinState s;
        s.m.assign(8, 1);
        s.m[4] = -1;
        CHECK(local_field(model, s, 0) == doctest::Approx(-1.0));
    }

    SUBCASE("matches a brute-force dot product") {
        const IsingModel model = random_model(topo, 31);
        SplitMix rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            SpinState s;
            for (int i = 0; i < 8; ++i) s.m.push_back(static_cast<std::int8_t>(rng.next_sign()));
            for (int i = 0; i < 8; ++i) {
                double expected = model.bias_value(i);
                for (int k = 0; k < model.edge_count(); ++k) {
                    const Edge& e = model.topology().edges()[k];
                    if (!model.edge_enabled(k)) continue;
                    if (e.a == i) expected += model.coupling_value(k) * s.m[e.b];
                    if (e.b == i) expected += model.coupling_value(k) * s.m[e.a];
                }
                CHECK(local_field(model, s, i) == doctest::Approx(expected).epsilon(1e-12));
            }
        }
    }
}

// Replays the documented semantics against ChainRunner: same seed derivation,
// same draw assignment, manual local_field + pbit_update loop.
TEST_CASE("sweep semantics replay") {
    auto topo = std::make_shared<const ChimeraTopology>(2, 2, 2);
    const IsingModel model = random_model(topo, 77);
    const std::uint64_t seed = 4242;

    for (const auto schedule : {UpdateSchedule::SequentialFixed,
                                UpdateSchedule::SequentialRandomPermutation,
                                UpdateSchedule::Chromatic}) {
        CAPTURE(static_cast<int>(schedule));
        HardwareProfile hw;
        hw.gain_sigma = 0.1;
        hw.offset_sigma = 0.05;
        hw.mismatch_seed = 3;

        ChainRunner runner(model, hw, 1.3, schedule, seed);
        runner.randomize_state();

        // independent replica
        const int n = model.node_count();
        NodeRandSource rand(*topo, hw, seed);
        MismatchTable mismatch(hw, n);
        SplitMix sched_rng(derive_seed(seed, kSaltScheduler));
        SplitMix init_rng(derive_seed(seed, kSaltInitState));
        SpinState mine;
        for (int i = 0; i < n; ++i) mine.m.push_back(static_cast<std::int8_t>(init_rng.next_sign()));
        for (int i = 0; i < n; ++i) REQUIRE(mine.m[i] == runner.state().m[i]);

        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        const auto colors = topo->two_coloring();

        for (int sweep = 0; sweep < 50; ++sweep) {
            runner.sweep_once();
            rand.begin_sweep();
            auto update = [&](int i) {
                const double field = local_field(model, mine, i);
                const auto eff = apply_mismatch(mismatch, i, 1.3, field);
                mine.m[i] = static_cast<std::int8_t>(
                    pbit_update(eff.field_eff, eff.beta_eff, rand.draw(i)));
            };
            if (schedule == UpdateSchedule::SequentialFixed) {
                for (int i = 0; i < n; ++i) update(i);
            } else if (schedule == UpdateSchedule::SequentialRandomPermutation) {
                for (int i = n - 1; i > 0; --i)
                    std::swap(order[i], order[sched_rng.next_below(static_cast<std::uint64_t>(i) + 1)]);
                for (int i : order) update(i);
            } else {
                for (int i = 0; i < n; ++i)
                    if (colors[i] == Color::A) update(i);
                for (int i = 0; i < n; ++i)
                    if (colors[i] == Color::B) update(i);
            }
            for (int i = 0; i < n; ++i) REQUIRE(mine.m[i] == runner.state().m[i]);
        }
    }
}

TEST_CASE("run_chain on the zero model gives fair coins") {
    auto topo = one_cell();
    const IsingModel model(topo);
    SamplerConfig cfg;
    cfg.beta = 1.0;
    cfg.sweeps = 100000;
    cfg.burn_in = 0;
    cfg.seed = 11;
    const ChainStats stats = run_chain(model, cfg, HardwareProfile{}, {});
    for (double m : stats.mean_spin) CHECK(std::abs(m) < 0.02);
    for (double e : stats.energy_trace) CHECK(e == 0.0);
    CHECK(stats.histogram.size() == 1);
    CHECK(stats.histogram[0] == 100000);
}

TEST_CASE("two-node ferromagnet matches the exact Boltzmann law") {
    auto topo = std::make_shared<const ChimeraTopology>(1, 1, 1);
    IsingModel model(topo);
    model.set_coupling_code(0, 127);
    const double beta = 2.0;

    SamplerConfig cfg;
    cfg.beta = beta;
    cfg.sweeps = 400000;
    cfg.burn_in = 1000;
    cfg.seed = 321;
    const ChainStats stats = run_chain(model, cfg, HardwareProfile{}, all_nodes(2));

    // aligned states each carry e^beta / (2 e^beta + 2 e^-beta)
    const double p_aligned = std::exp(beta) / (2 * std::exp(beta) + 2 * std::exp(-beta));
    const auto emp = empirical(stats);
    CHECK(emp[0b00] == doctest::Approx(p_aligned).epsilon(0.03));
    CHECK(emp[0b11] == doctest::Approx(p_aligned).epsilon(0.03));

    // pair correlation is tanh(beta)
    CHECK(stats.pair_correlation[0] == doctest::Approx(std::tanh(beta)).epsilon(0.01));
}

TEST_CASE("one-cell chain converges to the enumerated Boltzmann distribution") {
    auto topo = one_cell();
    const IsingModel model = random_model(topo, 2001);
    const auto exact = brute_force_boltzmann(model, 1.0);

    SamplerConfig cfg;
    cfg.beta = 1.0;
    cfg.sweeps = 300000;
    cfg.burn_in = 5000;
    cfg.seed = 7;
    const ChainStats stats = run_chain(model, cfg, HardwareProfile{}, all_nodes(8));
    CHECK(tv_distance(empirical(stats), exact) < 0.02);

    SUBCASE("chromatic schedule agrees") {
        SamplerConfig ccfg = cfg;
        ccfg.schedule = UpdateSchedule::Chromatic;
        ccfg.seed = 8;
        const ChainStats cstats = run_chain(model, ccfg, HardwareProfile{}, all_nodes(8));
        CHECK(tv_distance(empirical(cstats), exact) < 0.02);
        CHECK(tv_distance(empirical(cstats), empirical(stats)) < 0.02);
    }

    SUBCASE("permutation schedule agrees") {
        SamplerConfig pcfg = cfg;
        pcfg.schedule = UpdateSchedule::SequentialRandomPermutation;
        pcfg.seed = 9;
        const ChainStats pstats = run_chain(model, pcfg, HardwareProfile{}, all_nodes(8));
        CHECK(tv_distance(empirical(pstats), exact) < 0.02);
    }
}

TEST_CASE("12-spin chain matches enumeration") {
    auto topo = std::make_shared<const ChimeraTopology>(1, 2, 3);
    REQUIRE(topo->node_count() == 12);
    const IsingModel model = sk_instance(topo, CouplingDistribution::GaussianQuantized, 40);
    const auto exact = brute_force_boltzmann(model, 1.0);

    SamplerConfig cfg;
    cfg.beta = 1.0;
    cfg.sweeps = 1000000;
    cfg.burn_in = 10000;
    cfg.seed = 13;
    const ChainStats stats = run_chain(model, cfg, HardwareProfile{}, all_nodes(12));
    CHECK(tv_distance(empirical(stats), exact) < 0.02);
}

TEST_CASE("global flip symmetry with zero biases") {
    auto topo = std::make_shared<const ChimeraTopology>(1, 1, 2);
    const IsingModel model = random_model(topo, 55, /*with_bias=*/false);
    SamplerConfig cfg;
    cfg.beta = 1.0;
    cfg.sweeps = 400000;
    cfg.burn_in = 1000;
    cfg.seed = 99;
    const ChainStats stats = run_chain(model, cfg, HardwareProfile{}, all_nodes(4));
    const auto emp = empirical(stats);
    std::vector<double> flipped(emp.size());
    for (std::size_t i = 0; i < emp.size(); ++i) flipped[i] = emp[emp.size() - 1 - i]; // ~s = complement
    CHECK(tv_distance(emp, flipped) < 0.02);
}

TEST_CASE("determinism") {
    auto topo = one_cell();
    const IsingModel model = random_model(topo, 3);
    SamplerConfig cfg;
    cfg.beta = 1.5;
    cfg.sweeps = 5000;
    cfg.burn_in = 100;
    cfg.seed = 77;

    const ChainStats a = run_chain(model, cfg, HardwareProfile{}, all_nodes(8));
    const ChainStats b = run_chain(model, cfg, HardwareProfile{}, all_nodes(8));
    CHECK(a.mean_spin == b.mean_spin);
    CHECK(a.pair_correlation == b.pair_correlation);
    CHECK(a.histogram == b.histogram);
    CHECK(a.energy_trace == b.energy_trace);

    SUBCASE("chromatic is thread-count invariant") {
        SamplerConfig ccfg = cfg;
        ccfg.schedule = UpdateSchedule::Chromatic;
        const ChainStats t1 = run_chain(model, ccfg, HardwareProfile{}, all_nodes(8), 1);
        const ChainStats t4 = run_chain(model, ccfg, HardwareProfile{}, all_nodes(8), 4);
        CHECK(t1.histogram == t4.histogram);
        CHECK(t1.energy_trace == t4.energy_trace);
        CHECK(t1.mean_spin == t4.mean_spin);
    }

    SUBCASE("lfsr runs are deterministic too") {
        HardwareProfile hw;
        hw.rng_source = RngSource::Lfsr;
        const ChainStats a2 = run_chain(model, cfg, hw, all_nodes(8));
        const ChainStats b2 = run_chain(model, cfg, hw, all_nodes(8));
        CHECK(a2.histogram == b2.histogram);
    }
}

TEST_CASE("clamped runs") {
    auto topo = one_cell();
    const IsingModel model(topo); // zero model

    SUBCASE("all nodes clamped: single histogram bin") {
        ClampList clamps;
        for (int i = 0; i < 8; ++i) clamps.push_back({i, i % 2 == 0 ? +1 : -1});
        SamplerConfig cfg;
        cfg.beta = 1.0;
        cfg.sweeps = 1000;
        cfg.burn_in = 0;
        cfg.seed = 5;
        const ChainStats stats = clamped_run(model, cfg, HardwareProfile{}, clamps, all_nodes(8));
        const std::uint64_t expected_pattern = 0b01010101; // even nodes +1
        CHECK(stats.histogram[expected_pattern] == 1000);
        std::uint64_t total = 0;
        for (std::uint64_t c : stats.histogram) total += c;
        CHECK(total == 1000);
    }

    SUBCASE("clamping one node of a zero model leaves the rest fair") {
        SamplerConfig cfg;
        cfg.beta = 1.0;
        cfg.sweeps = 100000;
        cfg.burn_in = 0;
        cfg.seed = 6;
        const ChainStats stats =
            clamped_run(model, cfg, HardwareProfile{}, {{0, +1}}, all_nodes(8));
        CHECK(stats.mean_spin[0] == 1.0);
        for (int i = 1; i < 8; ++i) CHECK(std::abs(stats.mean_spin[i]) < 0.02);
    }

    SUBCASE("clamp on a nonexistent node") {
        SamplerConfig cfg;
        cfg.beta = 1.0;
        cfg.sweeps = 10;
        cfg.seed = 1;
        CHECK_THROWS_AS(clamped_run(model, cfg, HardwareProfile{}, {{100, +1}}, {}),
                        std::out_of_range);
    }
}

TEST_CASE("sampler configuration errors") {
    auto topo = one_cell();
    const IsingModel model(topo);
    SamplerConfig cfg;
    cfg.beta = 1.0;
    cfg.sweeps = 0;
    cfg.seed = 1;
    CHECK_THROWS_AS(run_chain(model, cfg, HardwareProfile{}, {}), config_error);
    cfg.sweeps = 10;
    cfg.burn_in = 10;
    CHECK_THROWS_AS(run_chain(model, cfg, HardwareProfile{}, {}), config_error);
}

TEST_CASE("histogram counts sum to sweeps minus burn-in") {
    auto topo = one_cell();
    const IsingModel model = random_model(topo, 8);
    SamplerConfig cfg;
    cfg.beta = 1.0;
    cfg.sweeps = 1234;
    cfg.burn_in = 234;
    cfg.seed = 2;
    const ChainStats stats = run_chain(model, cfg, HardwareProfile{}, {0, 3, 5});
    std::uint64_t total = 0;
    for (std::uint64_t c : stats.histogram) total += c;
    CHECK(total == 1000);
    CHECK(stats.energy_trace.size() == 1234);
    for (double c : stats.pair_correlation) {
        CHECK(c >= -1.0);
        CHECK(c <= 1.0);
    }
}
