#ifndef NFSDE_LEVY_HPP
#define NFSDE_LEVY_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace nfsde {

// One atom of the (finite-activity) intensity measure nu = sum rate_k * delta_{mark_k}.
struct JumpAtom {
    Eigen::VectorXd mark; // in U, nonzero
    double rate = 0.0;    // > 0

    double norm() const { return mark.norm(); }
    bool is_big() const { return norm() >= 1.0; } // the paper splits at |u| >= 1
};

struct LevySpec {
    int dim_u = 1;
    Eigen::VectorXd drift;  // the Levy-Ito drift a; carried for completeness, not used by Eq.-driving noise
    Eigen::VectorXd q_diag; // covariance eigenvalues of the Q-Wiener part
    std::vector<JumpAtom> atoms;

    void validate() const;
    double trace_q() const { return q_diag.sum(); }
    double total_rate() const;
};

// b = nu{|u| >= 1}: total rate of the uncompensated big jumps.
double big_jump_intensity(const LevySpec& spec);

// sum_{|u_k|<1} rate_k * integrand(u_k): the drift rate of the small-jump
// compensator; the solver subtracts dt times this from the small-jump sum.
Eigen::VectorXd small_jump_compensator(
    const LevySpec& spec, const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& integrand);

struct JumpEvent {
    double time = 0.0; // exact event time in (0, T]
    int atom = 0;      // index into LevySpec::atoms
};

// A realized driving path on a grid: independent Gaussian increments per
// step with per-coordinate variance q_i * dt, and exact jump times drawn
// as independent Poisson processes per atom. Deterministic function of
// (spec, grid, seed).
struct NoisePath {
    std::vector<double> grid;           // t_0 = 0 < ... < t_N
    Eigen::MatrixXd wiener_increments;  // dim_u x N, column j covers (t_j, t_{j+1}]
    std::vector<JumpEvent> events;      // sorted by time
    std::uint64_t seed = 0;

    int steps() const { return static_cast<int>(wiener_increments.cols()); }
    double horizon() const { return grid.empty() ? 0.0 : grid.back(); }
};

NoisePath sample_path(const LevySpec& spec, std::span<const double> grid, std::uint64_t seed);

} // namespace nfsde

#endif
