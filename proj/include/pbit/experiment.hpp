#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace pbit {

struct RunOptions {
    std::string out_dir;   // empty: config output.dir, then $PBITSIM_OUT, then "pbitsim_out"
    int threads = 1;       // caps workers; results are thread-count invariant
    std::optional<std::uint64_t> seed_override;
    std::filesystem::path base_dir; // relative file references resolve against this
};

// Runs one experiment. Outputs are assembled in memory and committed only
// after the run succeeds, so a failing config never leaves partial files.
// Everything except the manifest is a pure function of config + seeds.
std::vector<std::filesystem::path> run_experiment_json(const std::string& kind,
                                                       const nlohmann::json& config,
                                                       const RunOptions& options);

// CLI entry: returns 0 on success, 2 on configuration errors, 3 otherwise.
int run_experiment_file(const std::string& kind, const std::filesystem::path& config_path,
                        RunOptions options);

inline constexpr const char* kToolVersion = "0.1.0";

} // namespace pbit
