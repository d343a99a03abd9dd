#ifndef NFSDE_SOLVER_HPP
#define NFSDE_SOLVER_HPP

#include "nfsde/model.hpp"

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

namespace nfsde {

struct SolverConfig {
    enum class Scheme { TimeStep, Picard };

    double step_h = 0.125;
    double horizon_T = 8.0;
    Scheme scheme = Scheme::TimeStep;
    int picard_max_iter = 8;
    double neutral_fixed_point_tol = 1e-12;
    int neutral_max_iter = 100;

    // Grid alignment: step_h must divide tau, omega and horizon_T.
    void validate(const ModelSpec& model) const;
    int main_steps() const; // N = horizon_T / step_h
};

// Discrete cadlag trajectory on the grid -tau = s_0 < ... < 0 = t_0 < ... < t_N = T.
// The stored value at t_j is x(t_j) (post-jump); x(t_j^-) is the previous
// step's propagated value.
struct Trajectory {
    double step_h = 0.0;
    double tau = 0.0;
    int history_points = 0; // tau / step_h
    std::vector<double> grid;
    Eigen::MatrixXd values;      // d x grid.size()
    std::vector<int> jump_marks; // events absorbed at each grid index
    double neutral_residual_max = 0.0;

    int dim() const { return static_cast<int>(values.rows()); }
    int points() const { return static_cast<int>(values.cols()); }
    double horizon() const { return grid.empty() ? 0.0 : grid.back(); }
    // Exact grid lookup; throws std::invalid_argument for off-grid t.
    int index_of(double t) const;
};

// History window x_t as a Segment (grid sup-norm, no interpolation).
Segment segment_at(const Trajectory& traj, double t);

// One causal forward sweep of the discretized mild-solution equation,
// sharing the exact S_alpha kernel table across steps; the neutral term
// is resolved per step by fixed-point iteration (contraction since k0 < 1).
Trajectory simulate_mild(const ModelSpec& model, const SolverConfig& cfg,
                         const NoisePath& noise);

// Self-consistency diagnostic: plug a trajectory into the discretized
// right side of the mild equation and return the worst residual
// ||x(t_j) - (rhs_j - h(t_j, x_{t_j}))|| over the main grid.
double mild_residual(const ModelSpec& model, const SolverConfig& cfg, const NoisePath& noise,
                     const Trajectory& traj);

struct PicardDiagnostics {
    std::vector<double> sup_diffs; // D_n = sup-square difference between iterates n and n-1
    int iterations_run = 0;
    bool converged = false;
};

// Successive approximations from x^0(t) = S_alpha(t)(phi(0) + h(0, phi)),
// convolutions always evaluated on the previous iterate with the same
// noise path.
std::pair<Trajectory, PicardDiagnostics> picard_iterate(const ModelSpec& model,
                                                        const SolverConfig& cfg,
                                                        const NoisePath& noise);

struct Ensemble {
    std::shared_ptr<const ModelSpec> model;
    SolverConfig config;
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> path_seeds;
    std::vector<Trajectory> paths;
    std::vector<PicardDiagnostics> picard; // filled when the scheme is Picard

    int n_paths() const { return static_cast<int>(paths.size()); }
};

// n_paths independent trajectories with per-path seeds derived from the
// master seed; results are identical for any worker count.
Ensemble run_ensemble(const ModelSpec& model, const SolverConfig& cfg, int n_paths,
                      std::uint64_t master_seed, int n_workers = 1);

} // namespace nfsde

#endif
