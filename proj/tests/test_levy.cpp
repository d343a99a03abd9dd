#include "nfsde/levy.hpp"
#include "nfsde/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace nfsde;

namespace {

LevySpec one_atom_spec(double mark, double rate, double q = 0.0) {
    LevySpec s;
    s.dim_u = 1;
    s.drift = Eigen::VectorXd::Zero(1);
    s.q_diag = Eigen::VectorXd::Constant(1, q);
    JumpAtom a;
    a.mark = Eigen::VectorXd::Constant(1, mark);
    a.rate = rate;
    s.atoms.push_back(a);
    return s;
}

std::vector<double> grid_to(double T, int n) {
    std::vector<double> g(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) g[static_cast<std::size_t>(i)] = T * i / n;
    return g;
}

} // namespace

TEST_CASE("big_jump_intensity threshold sits at |u| >= 1") {
    LevySpec s;
    s.dim_u = 1;
    s.drift = Eigen::VectorXd::Zero(1);
    s.q_diag = Eigen::VectorXd::Zero(1);
    CHECK(big_jump_intensity(s) == 0.0);

    auto add = [&](double mark, double rate) {
        JumpAtom a;
        a.mark = Eigen::VectorXd::Constant(1, mark);
        a.rate = rate;
        s.atoms.push_back(a);
    };
    add(3.0, 2.0);
    CHECK(big_jump_intensity(s) == 2.0);
    s.atoms.clear();
    add(0.5, 7.0);
    add(1.0, 1.5); // |u| exactly 1 counts as big
    add(2.0, 0.5);
    CHECK(big_jump_intensity(s) == 2.0);
}

TEST_CASE("small jump compensator sums rate-weighted integrands over small atoms only") {
    LevySpec s;
    s.dim_u = 1;
    s.drift = Eigen::VectorXd::Zero(1);
    s.q_diag = Eigen::VectorXd::Zero(1);
    const auto v = small_jump_compensator(s, [](const Eigen::VectorXd& u) { return u; });
    CHECK(v.size() == 0); // no atoms -> zero vector

    JumpAtom small;
    small.mark = Eigen::VectorXd::Constant(1, 0.5);
    small.rate = 3.0;
    JumpAtom big;
    big.mark = Eigen::VectorXd::Constant(1, 2.0);
    big.rate = 10.0;
    s.atoms = {small, big};
    Eigen::VectorXd probe = Eigen::VectorXd::Constant(1, 4.0);
    const auto w = small_jump_compensator(s, [&](const Eigen::VectorXd&) { return probe; });
    CHECK(w(0) == doctest::Approx(12.0)); // 3 * 4, the big atom is excluded

    // linear integrand cross-checked against the Monte Carlo mean of the
    // raw small-jump sum divided by t
    JumpAtom small2;
    small2.mark = Eigen::VectorXd::Constant(1, -0.25);
    small2.rate = 1.5;
    s.atoms = {small, small2};
    const auto F = [](const Eigen::VectorXd& u) { return Eigen::VectorXd(2.0 * u); };
    const auto comp = small_jump_compensator(s, F);
    CHECK(comp(0) == doctest::Approx(3.0 * 1.0 + 1.5 * (-0.5)));

    const double T = 5.0;
    const auto grid = grid_to(T, 10);
    double mc = 0.0;
    const int n_paths = 10000;
    for (int k = 0; k < n_paths; ++k) {
        const NoisePath p = sample_path(s, grid, 4242 + static_cast<std::uint64_t>(k));
        double sum = 0.0;
        for (const auto& ev : p.events)
            sum += F(s.atoms[static_cast<std::size_t>(ev.atom)].mark)(0);
        mc += sum / T;
    }
    mc /= n_paths;
    // SE of the time-averaged jump sum: sqrt(sum_k rate_k F(u_k)^2 / T / n)
    const double se = std::sqrt((3.0 * 4.0 + 1.5 * 0.25) / T / n_paths);
    CHECK(std::abs(mc - comp(0)) < 3.0 * se);
}

TEST_CASE("degenerate spec: zero Q and no atoms gives a silent path") {
    LevySpec s;
    s.dim_u = 2;
    s.drift = Eigen::VectorXd::Zero(2);
    s.q_diag = Eigen::VectorXd::Zero(2);
    const NoisePath p = sample_path(s, grid_to(4.0, 16), 9);
    CHECK(p.events.empty());
    CHECK(p.wiener_increments.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Poisson event count: mean 20 over 1e4 seeds within the 3 sigma band") {
    const auto s = one_atom_spec(3.0, 2.0);
    const auto grid = grid_to(10.0, 10);
    const int n = 10000;
    double mean = 0.0;
    for (int k = 0; k < n; ++k)
        mean +=
            static_cast<double>(sample_path(s, grid, static_cast<std::uint64_t>(k)).events.size());
    mean /= n;
    CHECK(std::abs(mean - 20.0) < 3.0 * std::sqrt(20.0) / 100.0);
}

TEST_CASE("Poisson law per atom: mean and variance both approximately lambda t") {
    const auto s = one_atom_spec(0.5, 0.7);
    const auto grid = grid_to(8.0, 8);
    const double expect = 0.7 * 8.0;
    const int n = 10000;
    double mean = 0.0, m2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double c = static_cast<double>(
            sample_path(s, grid, 1000 + static_cast<std::uint64_t>(k)).events.size());
        const double d = c - mean;
        mean += d / (k + 1);
        m2 += d * (c - mean);
    }
    const double var = m2 / (n - 1);
    const double se_mean = std::sqrt(expect / n);
    // SE of a Poisson sample variance: sqrt((lambda t)(1 + 2 lambda t)/n)
    const double se_var = std::sqrt(expect * (1.0 + 2.0 * expect) / n);
    CHECK(std::abs(mean - expect) < 3.0 * se_mean);
    CHECK(std::abs(var - expect) < 3.0 * se_var);
}

TEST_CASE("Wiener increment variance over 1e4 seeds stays in [0.94, 1.06]") {
    LevySpec s;
    s.dim_u = 1;
    s.drift = Eigen::VectorXd::Zero(1);
    s.q_diag = Eigen::VectorXd::Constant(1, 1.0);
    const std::vector<double> grid{0.0, 1.0};
    const int n = 10000;
    double mean = 0.0, m2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double x = sample_path(s, grid, static_cast<std::uint64_t>(k)).wiener_increments(0, 0);
        const double d = x - mean;
        mean += d / (k + 1);
        m2 += d * (x - mean);
    }
    const double var = m2 / (n - 1);
    CHECK(var > 0.94);
    CHECK(var < 1.06);
}

TEST_CASE("compensation centering: E[jump sum - t compensator] = 0 within 3 SE") {
    auto s = one_atom_spec(0.5, 1.2);
    JumpAtom small2;
    small2.mark = Eigen::VectorXd::Constant(1, -0.7);
    small2.rate = 0.8;
    s.atoms.push_back(small2);
    const double T = 6.0;
    const auto grid = grid_to(T, 12);
    const auto F = [](const Eigen::VectorXd& u) { return Eigen::VectorXd(u * 1.5); };
    const double comp = small_jump_compensator(s, F)(0);
    const int n = 10000;
    double mean = 0.0, m2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const NoisePath p = sample_path(s, grid, 500 + static_cast<std::uint64_t>(k));
        double sum = 0.0;
        for (const auto& ev : p.events)
            sum += F(s.atoms[static_cast<std::size_t>(ev.atom)].mark)(0);
        const double x = sum - T * comp;
        const double d = x - mean;
        mean += d / (k + 1);
        m2 += d * (x - mean);
    }
    const double se = std::sqrt(m2 / (n - 1) / n);
    CHECK(std::abs(mean) < 3.0 * se);
}

TEST_CASE("bit-identical reproducibility and event ordering") {
    auto s = one_atom_spec(0.5, 1.0, 0.3);
    JumpAtom big;
    big.mark = Eigen::VectorXd::Constant(1, -2.0);
    big.rate = 0.6;
    s.atoms.push_back(big);
    const auto grid = grid_to(20.0, 80);
    const NoisePath a = sample_path(s, grid, 77);
    const NoisePath b = sample_path(s, grid, 77);
    CHECK(a.wiener_increments == b.wiener_increments);
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        CHECK(a.events[i].time == b.events[i].time);
        CHECK(a.events[i].atom == b.events[i].atom);
    }
    for (std::size_t i = 1; i < a.events.size(); ++i)
        CHECK(a.events[i].time >= a.events[i - 1].time);
    for (const auto& ev : a.events) {
        CHECK(ev.time > 0.0);
        CHECK(ev.time <= 20.0);
    }
}

TEST_CASE("adjacent seeds decorrelate: |rho| < 0.05 over 1e3 steps") {
    LevySpec s;
    s.dim_u = 1;
    s.drift = Eigen::VectorXd::Zero(1);
    s.q_diag = Eigen::VectorXd::Constant(1, 1.0);
    const auto grid = grid_to(1000.0, 1000);
    const NoisePath a = sample_path(s, grid, 31337);
    const NoisePath b = sample_path(s, grid, 31338);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (int i = 0; i < 1000; ++i) {
        sxy += a.wiener_increments(0, i) * b.wiener_increments(0, i);
        sxx += a.wiener_increments(0, i) * a.wiener_increments(0, i);
        syy += b.wiener_increments(0, i) * b.wiener_increments(0, i);
    }
    CHECK(std::abs(sxy / std::sqrt(sxx * syy)) < 0.05);
}

TEST_CASE("invalid specs are rejected with validation errors") {
    LevySpec s;
    s.dim_u = 0;
    CHECK_THROWS_AS(s.validate(), validation_error);
    s = one_atom_spec(0.0, 1.0); // zero mark
    CHECK_THROWS_AS(s.validate(), validation_error);
    s = one_atom_spec(1.0, -1.0); // nonpositive rate
    CHECK_THROWS_AS(s.validate(), validation_error);
    s = one_atom_spec(1.0, 1.0);
    s.q_diag(0) = -0.5;
    CHECK_THROWS_AS(s.validate(), validation_error);
    s = one_atom_spec(1.0, 1.0);
    const std::vector<double> bad_grid{0.0, 0.5, 0.5};
    CHECK_THROWS_AS(sample_path(s, bad_grid, 1), validation_error);
}
