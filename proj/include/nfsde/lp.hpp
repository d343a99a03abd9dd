#ifndef NFSDE_LP_HPP
#define NFSDE_LP_HPP

#include <Eigen/Dense>

#include <vector>

namespace nfsde {

// Exact solver for the empirical bounded-Lipschitz program
//
//     maximize   sum_i w_i f_i
//     subject to f_i - f_j <= d_ij   (all ordered pairs)
//                -1 <= f_i <= 1
//
// where d is a (pseudo)metric on the support points. Solved as a dense
// primal simplex on the substitution u = f + 1 (u in [0,2], all RHS >= 0,
// so the slack basis is feasible and no phase-1 is needed), with lazy row
// generation: only violated pairwise constraints enter the tableau, and
// optimality is certified by a full violation scan.
struct LpResult {
    double objective = 0.0;
    Eigen::VectorXd f;
    int simplex_iterations = 0;
    int rows_generated = 0;
    bool optimal = false;
    // Binding pairwise constraints at the optimum; reusable as a warm
    // start for solves that share the distance matrix (bootstrap).
    std::vector<std::pair<int, int>> active_pairs;
};

LpResult lipschitz_lp(const Eigen::VectorXd& weights, const Eigen::MatrixXd& dist,
                      const std::vector<std::pair<int, int>>* warm_start = nullptr,
                      double tol = 1e-11);

} // namespace nfsde

#endif
