#ifndef NFSDE_SECTORIAL_HPP
#define NFSDE_SECTORIAL_HPP

#include "nfsde/mittag_leffler.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace nfsde {

// Sectorial generator A of the fractional solution operator S_alpha.
// Restricted to real spectra given either as a scalar or as a
// diagonalizable matrix (eigenvalues + invertible basis). alpha = 2 is
// accepted structurally so the boundary cross-checks can run; it never
// passes check_sectorial.
struct SectorialSpec {
    double alpha = 1.5;
    double mu = -1.0;     // sector type, must be < 0
    double theta = 0.3;   // sector angle (radians)
    double C = 1.0;
    double M = 1.0;

    Eigen::VectorXd eigenvalues; // size d
    Eigen::MatrixXd basis;       // d x d, identity for scalar/diagonal specs

    static SectorialSpec scalar(double a, double alpha, double mu, double theta = 0.3,
                                double C = 1.0, double M = 1.0);
    static SectorialSpec diagonalizable(Eigen::VectorXd eigenvalues, Eigen::MatrixXd basis,
                                        double alpha, double mu, double theta = 0.3,
                                        double C = 1.0, double M = 1.0);

    int dim() const { return static_cast<int>(eigenvalues.size()); }
    bool is_scalar() const { return dim() == 1 && basis(0, 0) == 1.0; }

    // Structural invariants; throws std::invalid_argument.
    void validate() const;
};

// S_alpha(t) evaluated from the Mittag-Leffler identity
// S_alpha(t) = V diag(E_alpha(a_i t^alpha)) V^{-1};  S_alpha(0) = I.
struct OperatorValue {
    double t = 0.0;
    Eigen::MatrixXd matrix;
};

OperatorValue solution_operator_eval(const SectorialSpec& spec, double t);

// Hypothesis (H1) report: eigenvalue placement a_i <= mu < 0 and the
// angle window 0 < theta < pi(1 - alpha/2).
struct SectorReport {
    struct EigenvalueCheck {
        double value = 0.0;
        bool within = false;
    };
    std::vector<EigenvalueCheck> eigenvalue_checks;
    bool mu_negative = false;
    bool angle_ok = false;
    double angle_limit = 0.0;
    double basis_condition = 1.0;
    bool pass = false;

    std::string summary() const;
};

SectorReport check_sectorial(const SectorialSpec& spec);

// Empirical constant of the decay envelope ||S(t)|| <= C M/(1+|mu| t^a):
// max over the grid of ||S(t)|| (1+|mu| t^a)/M, spectral norm.
double decay_envelope(const SectorialSpec& spec, std::span<const double> t_grid);

// Same maximum plus stability diagnostics: the running maxima over grid
// prefixes reveal an envelope that keeps growing with the horizon (the
// alpha = 2 boundary case), and refine_change reports the relative
// change under 2x grid refinement.
struct EnvelopeReport {
    double c_emp = 0.0;
    std::vector<double> prefix_maxima; // over the first 1/8, 2/8, ..., 8/8 of the grid
    double refine_change = 0.0;
    bool diverging = false;
};

EnvelopeReport decay_envelope_report(const SectorialSpec& spec, std::span<const double> t_grid);

// Immutable table of S_alpha at the lags {0, h, ..., n h}, shared by all
// Monte Carlo paths, plus exact-lag evaluation for jump kernels.
class OperatorTable {
public:
    OperatorTable(const SectorialSpec& spec, double step_h, int n_lags);

    int lags() const { return n_lags_; }
    double step() const { return step_h_; }
    int dim() const { return static_cast<int>(spec_.eigenvalues.size()); }

    // Apply S_alpha(lag*h) to a vector.
    Eigen::VectorXd apply(int lag, const Eigen::VectorXd& v) const;
    // Apply S_alpha(t) at an off-grid lag (jump kernels).
    Eigen::VectorXd apply_at(double t, const Eigen::VectorXd& v) const;
    // Dense matrix at a grid lag.
    Eigen::MatrixXd matrix(int lag) const;

    // Eigen-coordinate diagonal E_alpha(a_r (lag h)^alpha) and the basis
    // maps, for callers that run whole convolutions in eigen-coordinates.
    double diag_entry(int r, int lag) const { return diag_table_(r, lag); }
    Eigen::VectorXd diag_at(double t) const { return diag_at_time(t); }
    bool scalar() const { return scalar_; }
    const Eigen::MatrixXd& basis_inverse() const { return basis_inv_; }

    const SectorialSpec& spec() const { return spec_; }

private:
    Eigen::VectorXd diag_at_time(double t) const;

    SectorialSpec spec_;
    double step_h_;
    int n_lags_;
    bool scalar_;
    Eigen::MatrixXd basis_inv_;
    Eigen::MatrixXd diag_table_; // d x (n_lags+1); column j = E_alpha(a_i (jh)^alpha)
    MlKernel kernel_;
};

} // namespace nfsde

#endif
