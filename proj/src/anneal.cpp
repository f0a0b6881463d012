#include "pbit/anneal.hpp"

#include "pbit/errors.hpp"
#include "pbit/parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace pbit {

void AnnealSchedule::validate() const {
    if (!(beta_start > 0) || !(beta_end > 0)) throw config_error("anneal: betas must be positive");
    if (beta_start > beta_end) throw config_error("anneal: beta_start must not exceed beta_end");
    if (sweeps < 1) throw config_error("anneal: schedule needs at least one sweep");
}

double beta_at(const AnnealSchedule& schedule, std::int64_t t) {
    schedule.validate();
    if (t < 0 || t >= schedule.sweeps) throw std::out_of_range("anneal: sweep index out of range");
    const double frac = schedule.sweeps > 1 ? static_cast<double>(t) / static_cast<double>(schedule.sweeps - 1) : 1.0;
    if (schedule.shape == ScheduleShape::Linear)
        return schedule.beta_start + (schedule.beta_end - schedule.beta_start) * frac;
    return schedule.beta_start * std::pow(schedule.beta_end / schedule.beta_start, frac);
}

AnnealResult anneal(const IsingModel& model, const AnnealSchedule& schedule,
                    const HardwareProfile& profile, std::uint64_t seed, int restarts,
                    UpdateSchedule update, int threads) {
    schedule.validate();
    if (restarts < 1) throw config_error("anneal: restarts must be >= 1");

    struct Slot {
        RestartTrace trace;
        SpinState best_state;
        double best_energy = 0.0;
    };
    std::vector<Slot> slots(restarts);

    parallel_for(restarts, threads, [&](std::int64_t r) {
        Slot& slot = slots[r];
        ChainRunner runner(model, profile, beta_at(schedule, 0), update, derive_seed(seed, r));
        runner.randomize_state();
        slot.best_state = runner.state();
        slot.best_energy = runner.energy();
        slot.trace.energy.reserve(schedule.sweeps);
        slot.trace.min_energy.reserve(schedule.sweeps);
        for (std::int64_t t = 0; t < schedule.sweeps; ++t) {
            runner.set_beta(beta_at(schedule, t));
            runner.sweep_once();
            const double e = runner.energy();
            slot.trace.energy.push_back(e);
            if (e < slot.best_energy) {
                slot.best_energy = e;
                slot.best_state = runner.state();
            }
            slot.trace.min_energy.push_back(slot.best_energy);
        }
    });

    AnnealResult out;
    out.best_restart = 0;
    out.best_energy = slots[0].best_energy;
    out.best_state = slots[0].best_state;
    out.traces.reserve(restarts);
    for (int r = 0; r < restarts; ++r) {
        if (slots[r].best_energy < out.best_energy) {
            out.best_energy = slots[r].best_energy;
            out.best_state = slots[r].best_state;
            out.best_restart = r;
        }
        out.traces.push_back(std::move(slots[r].trace));
    }
    return out;
}

IsingModel sk_instance(std::shared_ptr<const ChimeraTopology> topology,
                       CouplingDistribution distribution, std::uint64_t seed,
                       double gaussian_sigma) {
    IsingModel model(std::move(topology), 1.0, 1.0);
    SplitMix rng(derive_seed(seed, 0x534B4753)); // "SKGS"
    for (int k = 0; k < model.edge_count(); ++k) {
        if (distribution == CouplingDistribution::PlusMinusOne) {
            model.set_coupling_code(k, static_cast<WeightCode>(rng.next_sign() * kCodeMax));
        } else {
            double z0, z1;
            rng.next_normal_pair(z0, z1);
            model.set_coupling_code(k, quantize(gaussian_sigma * z0, 1.0));
        }
    }
    return model;
}

} // namespace pbit
