#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "pbit/anneal.hpp"
#include "pbit/errors.hpp"
#include "pbit/io.hpp"
#include "pbit/problems.hpp"
#include "pbit/random.hpp"

#include <cmath>
#include <memory>

using namespace pbit;

namespace {

std::shared_ptr<const ChimeraTopology> one_cell() {
    return std::make_shared<const ChimeraTopology>(1, 1, 4);
}

SpinState make_state(std::vector<int> spins) {
    SpinState s;
    for (int v : spins) s.m.push_back(static_cast<std::int8_t>(v));
    return s;
}

SpinState random_spins(int n, SplitMix& rng) {
    SpinState s;
    for (int i = 0; i < n; ++i) s.m.push_back(static_cast<std::int8_t>(rng.next_sign()));
    return s;
}

} // namespace

TEST_CASE("maxcut_encode basics") {
    auto topo = one_cell();

    SUBCASE("single edge: ground states anti-align, cut 1") {
        Graph g{8, {{0, 4, 1.0}}};
        const IsingModel model = maxcut_encode(g, topo);
        CHECK(model.coupling_code(0) == -127);
        CHECK(model.weight_scale() == 1.0);
        int enabled = 0;
        for (int k = 0; k < model.edge_count(); ++k) enabled += model.edge_enabled(k);
        CHECK(enabled == 1);
        const GroundResult ground = brute_force_ground(model);
        CHECK(ground.energy == doctest::Approx(-1.0));
        CHECK(ground.example.m[0] != ground.example.m[4]);
        CHECK(cut_value(g, ground.example) == doctest::Approx(1.0));
    }

    SUBCASE("4-cycle with unit weights cuts all four edges") {
        // V0-H0-V1-H1-V0 inside the cell
        Graph g{8, {{0, 4, 1.0}, {1, 4, 1.0}, {1, 5, 1.0}, {0, 5, 1.0}}};
        const MaxCutResult best = brute_force_maxcut(g);
        CHECK(best.cut == doctest::Approx(4.0));
    }

    SUBCASE("non-coupler edges are rejected") {
        CHECK_THROWS_AS(maxcut_encode(Graph{8, {{0, 1, 1.0}}}, topo), embed_error); // V-V
        CHECK_THROWS_AS(maxcut_encode(Graph{8, {{0, 0, 1.0}}}, topo), embed_error); // loop
        CHECK_THROWS_AS(maxcut_encode(Graph{8, {{0, 4, 1.0}, {4, 0, 2.0}}}, topo), embed_error);
        CHECK_THROWS_AS(maxcut_encode(Graph{9, {}}, topo), embed_error); // too many nodes
    }

    SUBCASE("weights normalize so max|w| hits full scale") {
        Graph g{8, {{0, 4, 2.0}, {1, 4, 4.0}}};
        const IsingModel model = maxcut_encode(g, topo);
        CHECK(model.weight_scale() == 1.0); // full-scale normalized couplings
        // edge ids follow the topology edge order: (0,4) is edge 0, (1,4) is edge 4
        CHECK(model.coupling_code(0) == -64); // -2/4 of full scale
        CHECK(model.coupling_code(4) == -127);
    }
}

TEST_CASE("cut_value") {
    Graph g{4, {{0, 1, 2.0}, {1, 2, 0.5}}};
    CHECK(cut_value(g, make_state({1, 1, 1, 1})) == 0.0);
    CHECK(cut_value(g, make_state({1, -1, 1, 1})) == doctest::Approx(2.5));
    CHECK_THROWS_AS(cut_value(g, make_state({1, 1})), shape_error);

    SUBCASE("identity cut = (W - sum w mm) / 2 on random states") {
        SplitMix rng(3);
        double w_total = 0.0;
        for (const auto& e : g.edges) w_total += e.w;
        for (int trial = 0; trial < 50; ++trial) {
            const SpinState s = random_spins(4, rng);
            double dot = 0.0;
            for (const auto& e : g.edges) dot += e.w * s.m[e.u] * s.m[e.v];
            CHECK(cut_value(g, s) == doctest::Approx((w_total - dot) / 2.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("cut/energy identity is exact in code units") {
    auto topo = std::make_shared<const ChimeraTopology>(1, 2, 4);
    SplitMix seeder(17);
    Graph g;
    g.node_count = topo->node_count();
    for (const Edge& e : topo->edges())
        if (seeder.next_unit() < 0.8)
            g.edges.push_back({e.a, e.b, 1.0 + static_cast<double>(seeder.next_below(127))});
    g.edges.front().w = 127.0;
    const IsingModel model = maxcut_encode(g, topo);

    SplitMix rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const SpinState s = random_spins(topo->node_count(), rng);
        const std::int64_t lhs = coupling_energy_code_units(model, s);
        const std::int64_t rhs = total_weight_code_units(model) - 2 * cut_value_code_units(model, s);
        CHECK(lhs == rhs); // exact, integer arithmetic
        // double route agrees to rounding
        const double e = model.energy(s);
        const double cut_deq = static_cast<double>(cut_value_code_units(model, s)) / 127.0 *
                               model.weight_scale();
        const double w_deq = static_cast<double>(total_weight_code_units(model)) / 127.0 *
                             model.weight_scale();
        CHECK(e == doctest::Approx(w_deq - 2.0 * cut_deq).epsilon(1e-12));
        // max weight is 127 and weights are integers, so codes equal weights
        // and the code-unit cut is the original-unit cut exactly
        CHECK(static_cast<double>(cut_value_code_units(model, s)) ==
              doctest::Approx(cut_value(g, s)).epsilon(1e-12));
    }
}

TEST_CASE("gate targets") {
    const TargetDistribution and_t = gate_targets(GateKind::And);
    CHECK(and_t.designated_nodes == std::vector<int>{0, 1, 2});
    REQUIRE(and_t.probs.size() == 8);
    CHECK(and_t.probs[0b111] == doctest::Approx(0.25)); // A=1,B=1,Out=1
    CHECK(and_t.probs[0b011] == 0.0);                   // A=1,B=1,Out=0
    CHECK(and_t.probs[0b000] == doctest::Approx(0.25));

    const TargetDistribution or_t = gate_targets(GateKind::Or);
    CHECK(or_t.probs[0b101] == doctest::Approx(0.25)); // A=1,B=0,Out=1
    const TargetDistribution xor_t = gate_targets(GateKind::Xor);
    CHECK(xor_t.probs[0b011] == doctest::Approx(0.25)); // A=1,B=1,Out=0

    const TargetDistribution fa = gate_targets(GateKind::FullAdder);
    REQUIRE(fa.probs.size() == 32);
    CHECK(fa.probs[0b11111] == doctest::Approx(0.125)); // 1+1+1 = Sum 1, Cout 1
    CHECK(fa.probs[0b10011] == doctest::Approx(0.125)); // 1+1+0 = Sum 0, Cout 1
    CHECK(fa.probs[0b00111] == 0.0);                    // 1+1+1 with Sum 0, Cout 0: invalid

    for (const auto* t : {&and_t, &or_t, &xor_t, &fa}) {
        double sum = 0.0;
        for (double p : t->probs) sum += p;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
        CHECK_NOTHROW(t->validate());
    }

    SUBCASE("serialization round trip") {
        const nlohmann::json j = target_to_json(fa);
        const TargetDistribution back = target_from_json(j);
        CHECK(back.designated_nodes == fa.designated_nodes);
        CHECK(back.probs == fa.probs);
    }
}

TEST_CASE("brute force oracles") {
    SUBCASE("one-spin closed form") {
        auto topo = std::make_shared<const ChimeraTopology>(1, 1, 1);
        IsingModel model(topo); // 2 nodes; isolate node 0 with bias
        model.set_edge_enabled(0, false);
        model.set_bias_code(0, 127);
        const auto probs = brute_force_boltzmann(model, 1.0);
        // node 0 spin +1 <=> index bit 0 set
        const double p_plus = probs[1] + probs[3];
        CHECK(p_plus == doctest::Approx((1.0 + std::tanh(1.0)) / 2.0).epsilon(1e-12));
    }

    SUBCASE("two-spin ferromagnet") {
        auto topo = std::make_shared<const ChimeraTopology>(1, 1, 1);
        IsingModel model(topo);
        model.set_coupling_code(0, 127);
        const GroundResult ground = brute_force_ground(model);
        CHECK(ground.energy == doctest::Approx(-1.0));
        CHECK(ground.degeneracy == 2);
    }

    SUBCASE("distribution sums to one") {
        auto topo = one_cell();
        const IsingModel model = sk_instance(topo, CouplingDistribution::GaussianQuantized, 5);
        const auto probs = brute_force_boltzmann(model, 2.0);
        double sum = 0.0;
        for (double p : probs) sum += p;
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }

    SUBCASE("budget refusal") {
        auto big = std::make_shared<const ChimeraTopology>(4, 4, 1); // 32 nodes
        const IsingModel model(big);
        CHECK_THROWS_AS(brute_force_ground(model), budget_error);
        CHECK_THROWS_AS(brute_force_boltzmann(model, 1.0), budget_error);
        Graph g{32, {}};
        CHECK_THROWS_AS(brute_force_maxcut(g), budget_error);
    }
}
