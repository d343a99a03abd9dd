#include "nfsde/sectorial.hpp"
#include "nfsde/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace nfsde;

namespace {

std::vector<double> uniform_grid(double t0, double t1, int n) {
    std::vector<double> g(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) g[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * i / n;
    return g;
}

} // namespace

TEST_CASE("solution operator at t = 0 is the identity, any alpha") {
    for (double alpha : {1.1, 1.5, 1.9, 2.0}) {
        const auto spec = SectorialSpec::scalar(-1.0, alpha, -1.0);
        const OperatorValue v = solution_operator_eval(spec, 0.0);
        CHECK(v.matrix(0, 0) == 1.0);
    }
    Eigen::MatrixXd basis(2, 2);
    basis << 1.0, 1.0, 0.0, 1.0;
    Eigen::VectorXd eigs(2);
    eigs << -1.0, -2.0;
    const auto spec = SectorialSpec::diagonalizable(eigs, basis, 1.5, -1.0);
    CHECK(solution_operator_eval(spec, 0.0).matrix.isIdentity(0.0));
}

TEST_CASE("alpha = 2 boundary cross-check: scalar a = -1 gives cos t") {
    const auto spec = SectorialSpec::scalar(-1.0, 2.0, -1.0);
    const OperatorValue v = solution_operator_eval(spec, M_PI);
    CHECK(v.matrix(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("scalar eval equals ml_eval") {
    const auto spec = SectorialSpec::scalar(-1.0, 1.5, -1.0);
    const OperatorValue v = solution_operator_eval(spec, 1.0);
    CHECK(v.matrix(0, 0) == ml_eval(1.5, 1.0, -1.0));
}

TEST_CASE("diagonalizable consistency with entrywise ml_eval") {
    Eigen::MatrixXd basis(3, 3);
    basis << 2.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 2.0;
    Eigen::VectorXd eigs(3);
    eigs << -0.5, -1.0, -3.0;
    const auto spec = SectorialSpec::diagonalizable(eigs, basis, 1.5, -0.5);
    for (double t : {0.25, 1.0, 4.0}) {
        const Eigen::MatrixXd S = solution_operator_eval(spec, t).matrix;
        Eigen::VectorXd diag(3);
        for (int i = 0; i < 3; ++i) diag(i) = ml_eval(1.5, 1.0, eigs(i) * std::pow(t, 1.5));
        const Eigen::MatrixXd expect = basis * diag.asDiagonal() * basis.inverse();
        CHECK((S - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("check_sectorial examples") {
    Eigen::VectorXd eigs(2);
    eigs << -1.0, -2.0;
    const auto pass_spec =
        SectorialSpec::diagonalizable(eigs, Eigen::MatrixXd::Identity(2, 2), 1.5, -1.0, 0.3);
    CHECK(check_sectorial(pass_spec).pass);

    Eigen::VectorXd bad(2);
    bad << -1.0, 0.5;
    const auto bad_spec =
        SectorialSpec::diagonalizable(bad, Eigen::MatrixXd::Identity(2, 2), 1.5, -1.0, 0.3);
    const SectorReport r = check_sectorial(bad_spec);
    CHECK_FALSE(r.pass);
    CHECK(r.eigenvalue_checks[0].within);
    CHECK_FALSE(r.eigenvalue_checks[1].within);
    CHECK(r.eigenvalue_checks[1].value == 0.5);

    // angle bound: pi(1 - 1.9/2) = 0.157 < 0.3
    const auto narrow = SectorialSpec::scalar(-1.0, 1.9, -1.0, 0.3);
    const SectorReport rn = check_sectorial(narrow);
    CHECK_FALSE(rn.pass);
    CHECK_FALSE(rn.angle_ok);
    CHECK(rn.angle_limit == doctest::Approx(M_PI * 0.05));
}

TEST_CASE("decay envelope: identity at the origin and refinement stability") {
    const auto spec = SectorialSpec::scalar(-1.0, 1.5, -1.0);
    const std::vector<double> zero_grid{0.0};
    CHECK(decay_envelope(spec, zero_grid) == doctest::Approx(1.0 / spec.M));

    for (double alpha : {1.25, 1.5, 1.75}) {
        const auto s = SectorialSpec::scalar(-1.0, alpha, -1.0);
        const auto coarse = uniform_grid(0.0, 100.0, 2000);
        const auto fine = uniform_grid(0.0, 100.0, 4000);
        const double c1 = decay_envelope(s, coarse);
        const double c2 = decay_envelope(s, fine);
        CHECK(std::isfinite(c1));
        CHECK(std::abs(c1 - c2) / c2 < 0.05);
        CHECK_FALSE(decay_envelope_report(s, fine).diverging);
    }
}

TEST_CASE("alpha = 2 envelope is flagged divergent (cos does not decay)") {
    const auto spec = SectorialSpec::scalar(-1.0, 2.0, -1.0);
    const auto grid = uniform_grid(0.0, 100.0, 4000);
    const EnvelopeReport rep = decay_envelope_report(spec, grid);
    CHECK(rep.diverging);
    CHECK(rep.prefix_maxima.back() > 2.0 * rep.prefix_maxima.front());
}

TEST_CASE("structural validation rejects bad specs") {
    CHECK_THROWS_AS(SectorialSpec::scalar(-1.0, 0.9, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(SectorialSpec::scalar(-1.0, 1.5, 0.5), std::invalid_argument);
    Eigen::MatrixXd singular = Eigen::MatrixXd::Zero(2, 2);
    Eigen::VectorXd eigs(2);
    eigs << -1.0, -2.0;
    CHECK_THROWS_AS(SectorialSpec::diagonalizable(eigs, singular, 1.5, -1.0),
                    std::invalid_argument);
    const auto spec = SectorialSpec::scalar(-1.0, 1.5, -1.0);
    CHECK_THROWS_AS(solution_operator_eval(spec, -0.5), std::invalid_argument);
}

TEST_CASE("operator table matches direct evaluation, on and off the grid") {
    Eigen::MatrixXd basis(2, 2);
    basis << 1.0, 1.0, 0.0, 2.0;
    Eigen::VectorXd eigs(2);
    eigs << -1.0, -2.5;
    const auto spec = SectorialSpec::diagonalizable(eigs, basis, 1.5, -1.0);
    OperatorTable table(spec, 0.25, 16);
    Eigen::VectorXd v(2);
    v << 0.7, -0.4;
    for (int lag : {0, 1, 7, 16}) {
        const Eigen::VectorXd a = table.apply(lag, v);
        const Eigen::VectorXd b = solution_operator_eval(spec, lag * 0.25).matrix * v;
        CHECK((a - b).norm() < 1e-13);
    }
    const Eigen::VectorXd a = table.apply_at(0.37, v);
    const Eigen::VectorXd b = solution_operator_eval(spec, 0.37).matrix * v;
    CHECK((a - b).norm() < 1e-13);
}
