#ifndef NFSDE_COEFFICIENTS_HPP
#define NFSDE_COEFFICIENTS_HPP

#include "nfsde/levy.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace nfsde {

// History window x_t on the solver grid: column theta_j = x(t - tau + j h),
// last column is x(t). Norm and functionals use grid points only; there is
// no interpolation anywhere.
class Segment {
public:
    Segment() = default;
    Segment(Eigen::MatrixXd values, double step_h, double t_label);

    int dim() const { return static_cast<int>(values_.rows()); }
    int points() const { return static_cast<int>(values_.cols()); }
    double step() const { return step_h_; }
    double t_label() const { return t_label_; }
    double tau() const { return step_h_ * (points() - 1); }

    const Eigen::MatrixXd& values() const { return values_; }
    Eigen::MatrixXd& values() { return values_; }

    Eigen::VectorXd at_zero() const { return values_.col(values_.cols() - 1); }
    Eigen::VectorXd at_minus_tau() const { return values_.col(0); }
    // (1/tau) integral of the window, trapezoidal on the grid.
    Eigen::VectorXd window_mean() const;

    // ||phi||_C = max over grid points of the H-norm.
    double sup_norm() const;
    double sup_norm_diff(const Segment& other) const;

private:
    Eigen::MatrixXd values_;
    double step_h_ = 0.0;
    double t_label_ = 0.0;
};

// c_per(t): continuous omega-periodic part given by Fourier coefficients.
// Evaluated through an exact fmod phase reduction so that c_per(t+omega)
// and c_per(t) are bit-identical whenever t and t+omega are exact doubles.
struct PeriodicCoeff {
    double period = 1.0;
    double a0 = 0.0;
    std::vector<double> cos_coef;
    std::vector<double> sin_coef;

    double eval(double t) const;
    double sup_bound() const; // |a0| + sum(|a_m| + |b_m|)
    bool is_zero() const;
};

// c_dec(t) = c0 / (1+t)^p, p >= 1.
struct DecayCoeff {
    double c0 = 0.0;
    double p = 1.0;

    double eval(double t) const { return c0 == 0.0 ? 0.0 : c0 / std::pow(1.0 + t, p); }
    bool is_zero() const { return c0 == 0.0; }
};

struct ScalarCoeff {
    PeriodicCoeff periodic;
    DecayCoeff decay;

    double eval(double t) const { return periodic.eval(t) + decay.eval(t); }
    double sup_bound() const { return periodic.sup_bound() + std::abs(decay.c0); }
    bool is_zero() const { return periodic.is_zero() && decay.is_zero(); }
};

enum class SegmentFunctional { ValueAtZero, ValueAtMinusTau, WindowMean };
enum class MarkScale { One, Norm };

Eigen::VectorXd apply_functional(SegmentFunctional f, const Segment& seg);

// h and f presets: (t, phi) -> c(t) * Lambda[phi].
struct DriftPreset {
    ScalarCoeff c;
    SegmentFunctional lambda = SegmentFunctional::ValueAtZero;

    Eigen::VectorXd eval(double t, const Segment& seg) const {
        return c.eval(t) * apply_functional(lambda, seg);
    }
    // |.|-Lipschitz bound in ||phi||_C (the Lambda functionals are 1-Lipschitz).
    double lipschitz_bound() const { return c.sup_bound(); }
    bool is_zero() const { return c.is_zero(); }
};

// g preset: (t, phi) -> c(t) * Lambda[phi] * e^T as an H x U map; applied
// to an increment it is c(t) (e . dw) Lambda[phi].
struct DiffusionPreset {
    ScalarCoeff c;
    SegmentFunctional lambda = SegmentFunctional::ValueAtZero;
    Eigen::VectorXd direction; // e in U

    Eigen::MatrixXd matrix(double t, const Segment& seg) const {
        return c.eval(t) * apply_functional(lambda, seg) * direction.transpose();
    }
    Eigen::VectorXd apply(double t, const Segment& seg, const Eigen::VectorXd& dw) const {
        return (c.eval(t) * direction.dot(dw)) * apply_functional(lambda, seg);
    }
    // (H3) constant for E||(dg) Q^{1/2}||^2: sup|c|^2 * e^T Q e.
    double lipschitz_bound(const LevySpec& noise) const {
        const double b = c.sup_bound();
        return b * b * direction.cwiseProduct(noise.q_diag).dot(direction);
    }
    bool is_zero() const { return c.is_zero() || direction.size() == 0 || direction.isZero(0.0); }
};

// F and G presets: (t, phi, u) -> c(t) * rho(u) * Lambda[phi].
struct JumpPreset {
    ScalarCoeff c;
    SegmentFunctional lambda = SegmentFunctional::ValueAtZero;
    MarkScale rho = MarkScale::One;

    double mark_scale(const Eigen::VectorXd& u) const {
        return rho == MarkScale::One ? 1.0 : u.norm();
    }
    Eigen::VectorXd eval(double t, const Segment& seg, const Eigen::VectorXd& u) const {
        return (c.eval(t) * mark_scale(u)) * apply_functional(lambda, seg);
    }
    // (H3) nu-integrated constant over the given threshold side:
    // sup|c|^2 * sum_side rate_k rho(u_k)^2.
    double lipschitz_bound(const LevySpec& noise, bool big_side) const;
    bool is_zero() const { return c.is_zero(); }
};

struct CoefficientSet {
    DriftPreset h;
    DriftPreset f;
    DiffusionPreset g;
    JumpPreset F; // small jumps, compensated
    JumpPreset G; // big jumps
    double declared_k0 = 0.0; // Lipschitz constant of h, must be in (0,1) unless h == 0
    double declared_L = 0.0;  // shared (H3) constant
    double sap_omega = 1.0;   // period the presets are S-asymptotically periodic with

    // Analytic bounds implied by the preset parameters.
    double analytic_k0(const LevySpec& noise) const;
    double analytic_L(const LevySpec& noise) const;

    void validate(const LevySpec& noise) const;
};

} // namespace nfsde

#endif
