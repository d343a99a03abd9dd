#ifndef NFSDE_IO_HPP
#define NFSDE_IO_HPP

#include "nfsde/periodicity.hpp"
#include "nfsde/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace nfsde {

inline constexpr const char* kArtifactVersion = "nfsde 0.1.0";

// FNV-1a 64-bit content hash; used for the manifest file inventory and
// the determinism checks.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string hash_hex(std::uint64_t h);

// CSV schemas (documented in the README):
//   trajectories.csv : path_id, t, x_0 .. x_{d-1}   (full %.17g precision)
//   picard.csv       : path_id, n, D_n
//   noise.csv        : path_id, t, dw_0 .. dw_{du-1}
//   jumps.csv        : path_id, time, atom
//   gaps.csv         : t, ms_gap, ms_se, trunc, trunc_se, bl, bl_se
void write_trajectories_csv(const std::filesystem::path& path, const Ensemble& ens);
void write_picard_csv(const std::filesystem::path& path, const Ensemble& ens);
void write_noise_csv(const std::filesystem::path& wiener_path,
                     const std::filesystem::path& jumps_path, const LevySpec& spec,
                     const std::vector<std::uint64_t>& seeds, const std::vector<double>& grid);
void write_report_csv(const std::filesystem::path& path, const PeriodicityReport& rep);
// gnuplot-ready two-to-three column gap-vs-t files
void write_gap_dat(const std::filesystem::path& path, const std::vector<double>& t,
                   const std::vector<double>& gap, const std::vector<double>& se);

std::string report_to_json(const PeriodicityReport& rep);

// Ensemble reconstruction for `analyze`: reads trajectories.csv written by
// `simulate` (full precision round-trip).
Ensemble read_trajectories_csv(const std::filesystem::path& path, const ModelSpec& model,
                               const SolverConfig& cfg);

struct RunManifest {
    std::string config_echo;
    std::uint64_t master_seed = 0;
    int n_paths = 0;
    std::string scheme;
    double step_h = 0.0;
    double horizon_T = 0.0;
    int grid_points = 0;
    std::string version;
    double wall_seconds = 0.0;
    std::vector<std::pair<std::string, std::string>> file_hashes;

    std::string to_json() const;
    static RunManifest from_json_file(const std::filesystem::path& path);
};

} // namespace nfsde

#endif
