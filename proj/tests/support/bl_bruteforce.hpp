#ifndef NFSDE_TESTS_BL_BRUTEFORCE_HPP
#define NFSDE_TESTS_BL_BRUTEFORCE_HPP

// Brute-force grid oracle for the bounded-Lipschitz program on small
// supports: exhaustive search over f-values discretized at `spacing`
// (default 1e-3), made tractable by depth-first enumeration with interval
// propagation and an upper-bound prune that never discards a grid point
// capable of beating the incumbent. Independent of the simplex code path.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace nfsde_tests {

class BlGridOracle {
public:
    BlGridOracle(const Eigen::VectorXd& w, const Eigen::MatrixXd& d, double spacing = 1e-3)
        : w_(w), d_(d), spacing_(spacing), n_(static_cast<int>(w.size())),
          f_(static_cast<std::size_t>(n_), 0.0) {
        order_.resize(static_cast<std::size_t>(n_));
        std::iota(order_.begin(), order_.end(), 0);
        std::sort(order_.begin(), order_.end(),
                  [&](int a, int b) { return std::abs(w(a)) > std::abs(w(b)); });
    }

    double solve() {
        best_ = -1e300;
        assigned_.clear();
        recurse(0, 0.0);
        return best_;
    }

private:
    // Feasible interval for variable i given the assigned values, with a
    // one-spacing slack so that rounded versions of the true optimum stay
    // admissible.
    void interval(int i, double& lo, double& hi) const {
        lo = -1.0;
        hi = 1.0;
        for (int j : assigned_) {
            lo = std::max(lo, f_[static_cast<std::size_t>(j)] - d_(i, j) - spacing_);
            hi = std::min(hi, f_[static_cast<std::size_t>(j)] + d_(i, j) + spacing_);
        }
    }

    void recurse(int depth, double partial) {
        if (depth == n_) {
            best_ = std::max(best_, partial);
            return;
        }
        // Optimistic bound over all unassigned variables.
        double bound = partial;
        for (int k = depth; k < n_; ++k) {
            const int i = order_[static_cast<std::size_t>(k)];
            double lo, hi;
            interval(i, lo, hi);
            if (lo > hi) return; // infeasible already
            bound += w_(i) * (w_(i) >= 0.0 ? hi : lo);
        }
        if (bound <= best_) return;

        const int i = order_[static_cast<std::size_t>(depth)];
        double lo, hi;
        interval(i, lo, hi);
        const long k_lo = static_cast<long>(std::ceil((lo + 1.0) / spacing_ - 1e-9));
        const long k_hi = static_cast<long>(std::floor((hi + 1.0) / spacing_ + 1e-9));
        assigned_.push_back(i);
        // Sweep from the profitable end so the incumbent improves early.
        if (w_(i) >= 0.0) {
            for (long k = k_hi; k >= k_lo; --k) {
                f_[static_cast<std::size_t>(i)] = -1.0 + spacing_ * static_cast<double>(k);
                recurse(depth + 1, partial + w_(i) * f_[static_cast<std::size_t>(i)]);
            }
        } else {
            for (long k = k_lo; k <= k_hi; ++k) {
                f_[static_cast<std::size_t>(i)] = -1.0 + spacing_ * static_cast<double>(k);
                recurse(depth + 1, partial + w_(i) * f_[static_cast<std::size_t>(i)]);
            }
        }
        assigned_.pop_back();
    }

    Eigen::VectorXd w_;
    Eigen::MatrixXd d_;
    double spacing_;
    int n_;
    std::vector<double> f_;
    std::vector<int> order_;
    std::vector<int> assigned_;
    double best_ = -1e300;
};

inline double bl_grid_oracle(const Eigen::VectorXd& w, const Eigen::MatrixXd& d,
                             double spacing = 1e-3) {
    return BlGridOracle(w, d, spacing).solve();
}

} // namespace nfsde_tests

#endif
