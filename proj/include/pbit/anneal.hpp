#pragma once

#include "pbit/sampler.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace pbit {

// Software stand-in for the chip's temperature-control voltage: an inverse
// temperature trajectory over sweeps, monotone non-decreasing.
enum class ScheduleShape : std::uint8_t { Linear, Geometric };

struct AnnealSchedule {
    double beta_start = 0.1;
    double beta_end = 3.0;
    std::int64_t sweeps = 1000;
    ScheduleShape shape = ScheduleShape::Geometric;

    void validate() const;
};

// Linear interpolates beta, Geometric interpolates log beta; endpoints exact.
// A single-sweep schedule evaluates to beta_end.
double beta_at(const AnnealSchedule& schedule, std::int64_t t);

struct RestartTrace {
    std::vector<double> energy;     // per sweep
    std::vector<double> min_energy; // running minimum, non-increasing
};

struct AnnealResult {
    SpinState best_state;
    double best_energy = 0.0;
    int best_restart = 0;
    std::vector<RestartTrace> traces;
};

// Independent restarts from random initial states; each restart owns a seeded
// stream, so results are identical for any worker count. Ties across restarts
// resolve to the lowest restart index.
AnnealResult anneal(const IsingModel& model, const AnnealSchedule& schedule,
                    const HardwareProfile& profile, std::uint64_t seed, int restarts,
                    UpdateSchedule update = UpdateSchedule::SequentialFixed, int threads = 1);

// Random spin-glass instance on the native couplers: i.i.d. coupling per
// enabled fabric edge, biases zero.
enum class CouplingDistribution : std::uint8_t { PlusMinusOne, GaussianQuantized };

IsingModel sk_instance(std::shared_ptr<const ChimeraTopology> topology,
                       CouplingDistribution distribution, std::uint64_t seed,
                       double gaussian_sigma = 0.3);

} // namespace pbit
