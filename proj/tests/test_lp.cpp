#include "nfsde/lp.hpp"
#include "nfsde/rng.hpp"
#include "support/bl_bruteforce.hpp"

#include <doctest.h>

#include <cmath>

using namespace nfsde;

namespace {

Eigen::MatrixXd metric_from_points(const Eigen::MatrixXd& pts) {
    const int n = static_cast<int>(pts.cols());
    Eigen::MatrixXd d(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d(i, j) = (pts.col(i) - pts.col(j)).cwiseAbs().maxCoeff();
    return d;
}

} // namespace

TEST_CASE("two Dirac masses: optimum is min(2, d)") {
    Eigen::VectorXd w(2);
    w << 1.0, -1.0;
    for (double dd : {0.25, 1.0, 1.7, 2.0, 3.5}) {
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
        d(0, 1) = d(1, 0) = dd;
        const LpResult r = lipschitz_lp(w, d);
        CHECK(r.optimal);
        CHECK(r.objective == doctest::Approx(std::min(2.0, dd)).epsilon(1e-10));
    }
}

TEST_CASE("zero weight vector gives 0") {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(3);
    Eigen::MatrixXd d = Eigen::MatrixXd::Constant(3, 3, 1.0);
    d.diagonal().setZero();
    CHECK(lipschitz_lp(w, d).objective == doctest::Approx(0.0));
}

TEST_CASE("spec 3-point example matches the grid oracle") {
    // shared support, weights (1/3,1/3,1/3) vs (1/2,1/2,0)
    Eigen::VectorXd w(3);
    w << 1.0 / 3 - 0.5, 1.0 / 3 - 0.5, 1.0 / 3;
    Eigen::MatrixXd pts(1, 3);
    pts << 0.0, 0.9, 2.1;
    const Eigen::MatrixXd d = metric_from_points(pts);
    const LpResult r = lipschitz_lp(w, d);
    const double oracle = nfsde_tests::bl_grid_oracle(w, d);
    CHECK(r.optimal);
    CHECK(std::abs(r.objective - oracle) <= 2e-3);
}

TEST_CASE("random instances up to 4 points match the grid oracle within 2e-3") {
    CounterRng rng(90210, 0, 0);
    for (int trial = 0; trial < 80; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform01() * 3.0);
        Eigen::MatrixXd pts(2, n);
        for (int j = 0; j < n; ++j)
            for (int r = 0; r < 2; ++r) pts(r, j) = 2.5 * (2.0 * rng.uniform01() - 1.0);
        Eigen::VectorXd w(n);
        double total = 0.0;
        for (int j = 0; j < n; ++j) {
            w(j) = 2.0 * rng.uniform01() - 1.0;
            total += std::abs(w(j));
        }
        if (total > 2.0) w *= 2.0 / total; // keep sum|w| <= 2 like empirical weights
        const Eigen::MatrixXd d = metric_from_points(pts);
        const LpResult r = lipschitz_lp(w, d);
        REQUIRE(r.optimal);
        const double oracle = nfsde_tests::bl_grid_oracle(w, d);
        CHECK(std::abs(r.objective - oracle) <= 2e-3);
    }
}

TEST_CASE("solution is feasible and supported on the box") {
    CounterRng rng(777, 0, 0);
    const int n = 40;
    Eigen::MatrixXd pts(3, n);
    for (int j = 0; j < n; ++j)
        for (int r = 0; r < 3; ++r) pts(r, j) = 2.0 * rng.uniform01() - 1.0;
    Eigen::VectorXd w(n);
    for (int j = 0; j < n; ++j) w(j) = (j < n / 2 ? 1.0 : -1.0) / (n / 2);
    const Eigen::MatrixXd d = metric_from_points(pts);
    const LpResult r = lipschitz_lp(w, d);
    REQUIRE(r.optimal);
    for (int i = 0; i < n; ++i) {
        CHECK(r.f(i) >= -1.0 - 1e-9);
        CHECK(r.f(i) <= 1.0 + 1e-9);
        for (int j = 0; j < n; ++j) CHECK(r.f(i) - r.f(j) <= d(i, j) + 1e-8);
    }
    CHECK(r.objective >= 0.0);
}

TEST_CASE("warm start reproduces the cold objective") {
    CounterRng rng(31415, 0, 0);
    const int n = 30;
    Eigen::MatrixXd pts(2, n);
    for (int j = 0; j < n; ++j)
        for (int r = 0; r < 2; ++r) pts(r, j) = rng.normal();
    Eigen::VectorXd w(n);
    for (int j = 0; j < n; ++j) w(j) = (j % 2 == 0 ? 1.0 : -1.0) / (n / 2);
    const Eigen::MatrixXd d = metric_from_points(pts);
    const LpResult cold = lipschitz_lp(w, d);
    Eigen::VectorXd w2 = w;
    w2(0) *= 0.7; // perturbed weights, same metric
    const LpResult warm = lipschitz_lp(w2, d, &cold.active_pairs);
    const LpResult cold2 = lipschitz_lp(w2, d);
    CHECK(warm.objective == doctest::Approx(cold2.objective).epsilon(1e-9));
}
