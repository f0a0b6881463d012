// pbitsim: experiment driver for the p-bit fabric emulator.
//
//   pbitsim <kind> --config <path> [--out <dir>] [--threads N] [--seed S]
//
// Kinds: sample | anneal | train | maxcut | characterize. The config file's
// "kind" field must match the subcommand. --seed overrides the config master
// seed; PBITSIM_OUT provides the default output directory.
// Exit codes: 0 ok, 2 configuration error, 3 runtime error.

#include "pbit/experiment.hpp"

#include <string>

#include "CLI11.hpp"

int main(int argc, char** argv) {
    CLI::App app{"pbitsim - probabilistic-bit fabric emulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = 1;
    std::uint64_t seed = 0;
    bool seed_set = false;

    const char* kinds[] = {"sample", "anneal", "train", "maxcut", "characterize"};
    for (const char* kind : kinds) {
        CLI::App* sub = app.add_subcommand(kind);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--threads", threads, "worker cap; results are thread-count invariant")
            ->check(CLI::PositiveNumber);
        sub->add_option_function<std::uint64_t>(
               "--seed", [&](std::uint64_t s) { seed = s; seed_set = true; },
               "override the config master seed");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    pbit::RunOptions options;
    options.out_dir = out_dir;
    options.threads = threads;
    if (seed_set) options.seed_override = seed;

    return pbit::run_experiment_file(app.get_subcommands().front()->get_name(), config_path,
                                     options);
}
