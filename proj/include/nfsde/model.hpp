#ifndef NFSDE_MODEL_HPP
#define NFSDE_MODEL_HPP

#include "nfsde/coefficients.hpp"
#include "nfsde/levy.hpp"
#include "nfsde/sectorial.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace nfsde {

// Initial segment phi on [-tau, 0]. Either constant in time or sampled on
// a grid whose spacing must match the solver step exactly.
struct InitialSegment {
    enum class Kind { Constant, Samples };
    Kind kind = Kind::Constant;
    Eigen::VectorXd constant_value;
    Eigen::MatrixXd samples; // d x (tau/h + 1), columns from theta = -tau to 0
    double sample_step = 0.0;

    // Sample onto a tau/h + 1 point grid; throws validation_error on mismatch.
    Eigen::MatrixXd materialize(double tau, double step_h) const;
    int dim() const;
};

struct ModelSpec {
    SectorialSpec sectorial;
    LevySpec noise;
    double tau = 1.0;   // delay
    double omega = 1.0; // candidate period
    InitialSegment phi;
    CoefficientSet coefficients;

    int dim() const { return sectorial.dim(); }
    void validate() const; // structural checks; throws validation_error
};

// kappa1 = |mu|^{-1/alpha} pi / (alpha sin(pi/alpha)) = integral_0^inf dt/(1+|mu| t^alpha).
double kappa1(double alpha, double mu);

// The Theorem 4.4 square-integral constant. paper_value is the printed
// formula |mu|^{-1/(2 alpha)} pi/(2 alpha sin(pi/(2 alpha))); quadrature_value
// is integral_0^inf (1+|mu| t^alpha)^{-2} dt computed numerically. They
// disagree (documented discrepancy) so both are always reported.
struct Kappa2 {
    double paper_value = 0.0;
    double quadrature_value = 0.0;
};
Kappa2 kappa2(double alpha, double mu);

enum class ContractionVariant { PaperLiteral, QuadratureExact };

// Theta = 5 k0^2 + 5 (CM)^2 L kappa1^2 (1+b) + 20 L (CM)^2 kappa2.
double contraction_constant(const ModelSpec& model, ContractionVariant variant);

struct ContractionReport {
    double kappa1_value = 0.0;
    Kappa2 kappa2_value;
    double b = 0.0;
    double theta_paper = 0.0;
    double theta_quadrature = 0.0;
    bool pass_paper = false;
    bool pass_quadrature = false;
    double margin_paper = 0.0;
    double margin_quadrature = 0.0;

    std::string table() const;
};
ContractionReport check_contraction(const ModelSpec& model);

// Empirical falsification of the declared Lipschitz constants plus the
// (H1)-(H3) structure checks. Declared constants are authoritative;
// sampling can only flag them.
struct QuotientCheck {
    std::string name;
    double max_quotient = 0.0; // squared-norm quotient (k0^2 scale for h)
    double declared = 0.0;     // declared bound on the same scale
    bool flagged = false;
};

struct HypothesisReport {
    SectorReport sector;
    bool k0_in_range = false;
    double declared_k0 = 0.0;
    double declared_L = 0.0;
    double analytic_k0 = 0.0;
    double analytic_L = 0.0;
    double trace_q = 0.0;
    double zero_residual_max = 0.0;
    bool zero_at_zero_ok = false;
    std::vector<QuotientCheck> quotients;
    bool dims_ok = false;
    bool pass = false;

    std::string table() const;
};

HypothesisReport validate_hypotheses(const ModelSpec& model, int sample_budget,
                                     std::uint64_t seed);

} // namespace nfsde

#endif
