#ifndef NFSDE_PIPELINE_HPP
#define NFSDE_PIPELINE_HPP

#include "nfsde/config.hpp"
#include "nfsde/io.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nfsde {

// Exit codes shared by every subcommand (CLI11 reserves 1 for usage errors).
enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kHypothesisFailure = 3,
    kRuntimeFailure = 4,
    kVerdictFail = 5,
};

int cmd_ml_eval(double alpha, double beta, double z);

int cmd_op_table(const std::filesystem::path& config, const std::filesystem::path& grid_out);

// Prints the hypothesis report and both contraction constants; exit
// kHypothesisFailure when (H1)-(H3) fail. Theta >= 1 alone is reported
// but is not a hypothesis failure.
int cmd_check(const std::filesystem::path& config, const std::filesystem::path& json_out = {},
              std::uint64_t seed = 7);

struct SimulateOptions {
    std::filesystem::path config;
    std::optional<std::string> scheme; // override: "time_step" | "picard"
    std::optional<int> paths;
    std::uint64_t seed = 1;
    std::filesystem::path out;
    int threads = 1;
    bool dump_noise = false;
};

int cmd_simulate(const SimulateOptions& opt);

struct AnalyzeOptionsCli {
    std::filesystem::path runs;
    std::optional<double> omega;
    std::optional<std::vector<double>> checkpoints;
    std::filesystem::path out;
    int threads = 1;
    std::uint64_t seed = 2024;
};

int cmd_analyze(const AnalyzeOptionsCli& opt);

struct ReportOptions {
    std::filesystem::path runs;     // simulate output (manifest)
    std::filesystem::path analysis; // analyze output
    std::filesystem::path out;
};

int cmd_report(const ReportOptions& opt);

// Helper shared with tests: default output root from NFSDE_OUT_ROOT.
std::filesystem::path resolve_out_dir(const std::filesystem::path& cli_out,
                                      const std::string& subcommand);

} // namespace nfsde

#endif
