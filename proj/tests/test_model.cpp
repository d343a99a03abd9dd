#include "nfsde/model.hpp"
#include "nfsde/errors.hpp"

#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>

using namespace nfsde;

namespace {

ModelSpec base_model() {
    ModelSpec m;
    m.sectorial = SectorialSpec::scalar(-1.0, 1.5, -1.0, 0.3);
    m.noise.dim_u = 1;
    m.noise.drift = Eigen::VectorXd::Zero(1);
    m.noise.q_diag = Eigen::VectorXd::Constant(1, 0.04);
    m.tau = 1.0;
    m.omega = 2.0;
    m.phi.kind = InitialSegment::Kind::Constant;
    m.phi.constant_value = Eigen::VectorXd::Constant(1, 0.5);
    m.coefficients.declared_k0 = 0.1;
    m.coefficients.declared_L = 0.01;
    m.coefficients.sap_omega = 2.0;
    m.coefficients.g.direction = Eigen::VectorXd::Constant(1, 1.0);
    for (auto* c : {&m.coefficients.h.c, &m.coefficients.f.c, &m.coefficients.g.c,
                    &m.coefficients.F.c, &m.coefficients.G.c})
        c->periodic.period = 2.0;
    return m;
}

} // namespace

TEST_CASE("kappa1: closed form vs adaptive quadrature on the full grid") {
    CHECK(std::abs(kappa1(2.0, -1.0) - M_PI / 2.0) < 1e-10);
    boost::math::quadrature::exp_sinh<double> integrator;
    for (double alpha : {1.1, 1.25, 1.5, 1.75, 1.9, 2.0}) {
        for (double mu : {-0.5, -1.0, -4.0}) {
            const double amu = std::abs(mu);
            const double quad = integrator.integrate(
                [&](double t) { return 1.0 / (1.0 + amu * std::pow(t, alpha)); }, 1e-12);
            CHECK(std::abs(kappa1(alpha, mu) - quad) < 1e-8);
        }
    }
}

TEST_CASE("kappa1 scaling law in mu") {
    for (double alpha : {1.25, 1.6, 1.9})
        for (double mu : {-0.3, -2.0, -7.5})
            CHECK(kappa1(alpha, mu) ==
                  doctest::Approx(std::pow(std::abs(mu), -1.0 / alpha) * kappa1(alpha, -1.0))
                      .epsilon(1e-13));
}

TEST_CASE("kappa2: both values exist, differ, and the quadrature one matches the Beta form") {
    const Kappa2 k = kappa2(2.0, -1.0);
    CHECK(std::abs(k.quadrature_value - M_PI / 4.0) < 1e-10);
    CHECK(std::abs(k.paper_value - M_PI / (4.0 * std::sin(M_PI / 4.0))) < 1e-12);
    CHECK(std::abs(k.paper_value - 1.1107207345395915) < 1e-12);
    CHECK(k.paper_value != k.quadrature_value);

    for (double alpha : {1.1, 1.25, 1.5, 1.75, 1.9, 2.0}) {
        for (double mu : {-0.5, -1.0, -4.0}) {
            const Kappa2 kk = kappa2(alpha, mu);
            const double beta_form = std::pow(std::abs(mu), -1.0 / alpha) * (1.0 - 1.0 / alpha) *
                                     M_PI / (alpha * std::sin(M_PI / alpha));
            CHECK(std::abs(kk.quadrature_value - beta_form) < 1e-8);
        }
    }
}

TEST_CASE("contraction constant examples") {
    ModelSpec m = base_model();

    // L = 0, k0 = 0.1: only the first term survives
    m.coefficients.declared_k0 = 0.1;
    m.coefficients.declared_L = 0.0;
    CHECK(contraction_constant(m, ContractionVariant::PaperLiteral) == doctest::Approx(0.05));
    CHECK(1.0 - contraction_constant(m, ContractionVariant::PaperLiteral) ==
          doctest::Approx(0.95));

    // k0 = 0, b = 0, C = M = 1, alpha = 2, mu = -1, L = 0.01, paper variant:
    // 5*0.01*(pi/2)^2 + 20*0.01*pi/(4 sin(pi/4)) = 0.34551420192153528
    m.sectorial = SectorialSpec::scalar(-1.0, 2.0, -1.0, 0.1);
    m.coefficients.declared_k0 = 0.0;
    m.coefficients.h = DriftPreset{}; // zero h so k0 = 0 is allowed
    m.coefficients.declared_L = 0.01;
    m.coefficients.f.c.periodic.a0 = 0.05; // nonzero so L > 0 passes validation
    const double theta = contraction_constant(m, ContractionVariant::PaperLiteral);
    CHECK(theta == doctest::Approx(0.34551420192153528).epsilon(1e-12));

    // scale L by 100: the check fails
    m.coefficients.declared_L = 1.0;
    const double theta_big = contraction_constant(m, ContractionVariant::PaperLiteral);
    CHECK(theta_big == doctest::Approx(34.551420192153528 - 31.0 * 0.0).epsilon(1e-10));
    CHECK(theta_big >= 1.0);
    const ContractionReport rep = check_contraction(m);
    CHECK_FALSE(rep.pass_paper);
    CHECK(rep.kappa2_value.paper_value != rep.kappa2_value.quadrature_value);
}

TEST_CASE("contraction constant is monotone in k0^2, L, b, C, M") {
    ModelSpec m = base_model();
    m.coefficients.f.c.periodic.a0 = 0.05;
    const double base = contraction_constant(m, ContractionVariant::QuadratureExact);

    ModelSpec m2 = m;
    m2.coefficients.declared_k0 = 0.3;
    CHECK(contraction_constant(m2, ContractionVariant::QuadratureExact) > base);
    m2 = m;
    m2.coefficients.declared_L = 0.02;
    CHECK(contraction_constant(m2, ContractionVariant::QuadratureExact) > base);
    m2 = m;
    JumpAtom big;
    big.mark = Eigen::VectorXd::Constant(1, 2.0);
    big.rate = 0.5;
    m2.noise.atoms.push_back(big);
    CHECK(contraction_constant(m2, ContractionVariant::QuadratureExact) > base);
    m2 = m;
    m2.sectorial.C = 1.5;
    CHECK(contraction_constant(m2, ContractionVariant::QuadratureExact) > base);
    m2 = m;
    m2.sectorial.M = 2.0;
    CHECK(contraction_constant(m2, ContractionVariant::QuadratureExact) > base);
}

TEST_CASE("kappa domain errors") {
    CHECK_THROWS_AS(kappa1(1.5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(kappa1(1.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(kappa2(1.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(kappa1(0.9, -1.0), std::invalid_argument);
}

TEST_CASE("validate_hypotheses: all-zero coefficients pass with zero quotients") {
    ModelSpec m = base_model();
    m.coefficients.declared_k0 = 0.5;
    m.coefficients.declared_L = 1.0;
    const HypothesisReport rep = validate_hypotheses(m, 200, 11);
    CHECK(rep.pass);
    CHECK(rep.zero_residual_max == 0.0);
    for (const auto& q : rep.quotients) {
        CHECK(q.max_quotient == 0.0);
        CHECK_FALSE(q.flagged);
    }
    CHECK(rep.trace_q == doctest::Approx(0.04));
}

TEST_CASE("validate_hypotheses flags an h that exceeds its declared k0") {
    ModelSpec m = base_model();
    // h(t, phi) = 0.9 phi(-tau), declared k0 = 0.5: quotient 0.81 > 0.25
    m.coefficients.h.c.periodic.a0 = 0.9;
    m.coefficients.h.lambda = SegmentFunctional::ValueAtMinusTau;
    m.coefficients.declared_k0 = 0.5;
    m.coefficients.declared_L = 1.0;
    m.coefficients.f.c.periodic.a0 = 0.1;
    const HypothesisReport rep = validate_hypotheses(m, 400, 11);
    CHECK_FALSE(rep.pass);
    CHECK(rep.quotients[0].name == "h");
    CHECK(rep.quotients[0].flagged);
    CHECK(rep.quotients[0].max_quotient == doctest::Approx(0.81).epsilon(1e-6));
}

TEST_CASE("validate_hypotheses: decaying f preset quotient approaches sup_t c(t)^2") {
    ModelSpec m = base_model();
    // f(t, phi) = (0.3 + 0.1/(1+t)) phi(0): sup quotient 0.16 at t = 0
    m.coefficients.f.c.periodic.a0 = 0.3;
    m.coefficients.f.c.decay.c0 = 0.1;
    m.coefficients.f.c.decay.p = 1.0;
    m.coefficients.declared_L = 0.16;
    const HypothesisReport rep = validate_hypotheses(m, 600, 11);
    CHECK_FALSE(rep.quotients[1].flagged);
    CHECK(rep.quotients[1].max_quotient == doctest::Approx(0.16).epsilon(1e-9));
    CHECK(rep.quotients[1].max_quotient <= 0.16 + 1e-12);

    // understate the constant and it gets flagged
    m.coefficients.declared_L = 0.09;
    const HypothesisReport bad = validate_hypotheses(m, 600, 11);
    CHECK(bad.quotients[1].flagged);
    CHECK_FALSE(bad.pass);
}

TEST_CASE("validate_hypotheses reports dimension mismatches as validation errors") {
    ModelSpec m = base_model();
    m.phi.constant_value = Eigen::VectorXd::Constant(2, 0.5);
    CHECK_THROWS_AS(validate_hypotheses(m, 200, 1), validation_error);
    CHECK_THROWS_AS(validate_hypotheses(base_model(), 50, 1), std::invalid_argument);
}
