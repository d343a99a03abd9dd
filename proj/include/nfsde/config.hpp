#ifndef NFSDE_CONFIG_HPP
#define NFSDE_CONFIG_HPP

#include "nfsde/periodicity.hpp"
#include "nfsde/solver.hpp"

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <string>

namespace nfsde {

struct AnalysisConfig {
    std::vector<double> checkpoints{5.0, 10.0, 20.0, 40.0, 80.0};
    int paths = 2000;
    int cloud_size = 120;
    int bootstrap = 200;
    double decay_fraction = 0.25;
    int lp_cap = 1000;
    int validation_budget = 400;
};

struct LoadedConfig {
    ModelSpec model;
    SolverConfig solver;
    AnalysisConfig analysis;
    // Fully resolved config (defaults applied); reproducing a run needs
    // nothing beyond this echo, the master seed and the code version.
    std::string echo;
};

// Strict loader: unknown keys are rejected, parse errors carry the
// position, validation errors carry the field path.
LoadedConfig load_config(const std::filesystem::path& path);
LoadedConfig parse_config(const nlohmann::json& root, const std::string& origin);

} // namespace nfsde

#endif
