#include "nfsde/lp.hpp"
#include "nfsde/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace nfsde {

namespace {

// Dense tableau primal simplex for
//   max c.u  s.t.  A u <= b, u >= 0,  all b >= 0.
// Dantzig pricing with a Bland fallback after a run of degenerate pivots.
struct Simplex {
    int n = 0, m = 0;
    Eigen::MatrixXd T;       // m x (n + m + 1), last column = rhs
    Eigen::VectorXd cost;    // reduced costs, length n + m
    std::vector<int> basis;  // basis[r] = column index
    int iterations = 0;

    void init(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
        n = static_cast<int>(c.size());
        m = static_cast<int>(A.rows());
        T.setZero(m, n + m + 1);
        T.leftCols(n) = A;
        T.block(0, n, m, m).setIdentity();
        T.col(n + m) = b;
        cost.setZero(n + m);
        cost.head(n) = c;
        basis.resize(static_cast<std::size_t>(m));
        for (int r = 0; r < m; ++r) basis[static_cast<std::size_t>(r)] = n + r;
    }

    // Returns false only if unbounded (cannot happen with box rows present).
    bool solve(double tol, int max_iter) {
        int degenerate_run = 0;
        bool bland = false;
        for (iterations = 0; iterations < max_iter; ++iterations) {
            int q = -1;
            if (!bland) {
                double best = tol;
                for (int jcol = 0; jcol < n + m; ++jcol)
                    if (cost(jcol) > best) {
                        best = cost(jcol);
                        q = jcol;
                    }
            } else {
                for (int jcol = 0; jcol < n + m; ++jcol)
                    if (cost(jcol) > tol) {
                        q = jcol;
                        break;
                    }
            }
            if (q < 0) return true; // optimal

            int r = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (int row = 0; row < m; ++row) {
                const double a = T(row, q);
                if (a <= 1e-12) continue;
                const double ratio = T(row, n + m) / a;
                if (ratio < best_ratio - 1e-15 ||
                    (ratio < best_ratio + 1e-15 && r >= 0 &&
                     basis[static_cast<std::size_t>(row)] < basis[static_cast<std::size_t>(r)])) {
                    best_ratio = ratio;
                    r = row;
                }
            }
            if (r < 0) return false; // unbounded

            if (best_ratio <= 1e-13) {
                if (++degenerate_run > 40) bland = true;
            } else {
                degenerate_run = 0;
                bland = false;
            }

            pivot(r, q);
        }
        return true; // iteration cap; caller treats current point as best effort
    }

    void pivot(int r, int q) {
        T.row(r) /= T(r, q);
        for (int row = 0; row < m; ++row) {
            if (row == r) continue;
            const double a = T(row, q);
            if (a != 0.0) T.row(row) -= a * T.row(r);
        }
        const double cq = cost(q);
        if (cq != 0.0) cost -= cq * T.row(r).head(n + m).transpose();
        basis[static_cast<std::size_t>(r)] = q;
    }

    Eigen::VectorXd solution() const {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
        for (int r = 0; r < m; ++r)
            if (basis[static_cast<std::size_t>(r)] < n)
                u(basis[static_cast<std::size_t>(r)]) = T(r, n + m);
        return u;
    }
};

} // namespace

LpResult lipschitz_lp(const Eigen::VectorXd& weights, const Eigen::MatrixXd& dist,
                      const std::vector<std::pair<int, int>>* warm_start, double tol) {
    const int n = static_cast<int>(weights.size());
    if (n == 0) throw std::invalid_argument("lipschitz_lp: empty support");
    if (dist.rows() != n || dist.cols() != n)
        throw std::invalid_argument("lipschitz_lp: distance matrix shape mismatch");

    LpResult out;
    out.f = Eigen::VectorXd::Zero(n);
    if (n == 1) {
        out.f(0) = weights(0) >= 0.0 ? 1.0 : -1.0;
        out.objective = std::abs(weights(0));
        out.optimal = true;
        return out;
    }

    // Working rows: ordered pairs (i, j) standing for u_i - u_j <= d_ij.
    std::vector<std::pair<int, int>> rows;
    if (warm_start)
        for (auto [i, j] : *warm_start)
            if (i >= 0 && i < n && j >= 0 && j < n && i != j) rows.emplace_back(i, j);

    constexpr int kMaxRounds = 200;
    for (int round = 0; round < kMaxRounds; ++round) {
        const int m = n + static_cast<int>(rows.size());
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n);
        Eigen::VectorXd b(m);
        for (int i = 0; i < n; ++i) { // box rows u_i <= 2
            A(i, i) = 1.0;
            b(i) = 2.0;
        }
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const auto [i, j] = rows[k];
            const int r = n + static_cast<int>(k);
            // u_i - u_j <= d_ij + (shift cancels: (f_i+1) - (f_j+1) = f_i - f_j)
            A(r, i) = 1.0;
            A(r, j) = -1.0;
            b(r) = dist(i, j);
        }

        Simplex sx;
        sx.init(weights, A, b);
        if (!sx.solve(tol, 40 * (n + m) + 2000))
            throw eval_error("lipschitz_lp: simplex reported an unbounded program");
        out.simplex_iterations += sx.iterations;
        out.f = sx.solution().array() - 1.0;

        // Violation scan over all ordered pairs.
        std::vector<std::tuple<double, int, int>> violated;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                const double v = out.f(i) - out.f(j) - dist(i, j);
                if (v > 50.0 * tol) violated.emplace_back(v, i, j);
            }
        if (violated.empty()) {
            out.objective = weights.dot(out.f);
            out.optimal = true;
            out.rows_generated = static_cast<int>(rows.size());
            out.active_pairs.clear();
            for (const auto& [i, j] : rows)
                if (std::abs(out.f(i) - out.f(j) - dist(i, j)) <= 100.0 * tol)
                    out.active_pairs.emplace_back(i, j);
            return out;
        }

        // Keep binding rows (drop slack ones while the working set is young),
        // then admit the worst violations, at most 2n per round.
        if (round < 10) {
            std::vector<std::pair<int, int>> kept;
            kept.reserve(rows.size());
            for (const auto& [i, j] : rows)
                if (out.f(i) - out.f(j) >= dist(i, j) - 1000.0 * tol) kept.emplace_back(i, j);
            rows = std::move(kept);
        }
        std::sort(violated.begin(), violated.end(),
                  [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
        std::set<std::pair<int, int>> have(rows.begin(), rows.end());
        const std::size_t admit = std::min<std::size_t>(violated.size(), 2 * static_cast<std::size_t>(n));
        for (std::size_t k = 0; k < admit; ++k) {
            const auto& [v, i, j] = violated[k];
            if (have.emplace(i, j).second) rows.emplace_back(i, j);
        }
    }
    throw eval_error("lipschitz_lp: row generation did not converge");
}

} // namespace nfsde
