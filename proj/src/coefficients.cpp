#include "nfsde/coefficients.hpp"
#include "nfsde/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace nfsde {

Segment::Segment(Eigen::MatrixXd values, double step_h, double t_label)
    : values_(std::move(values)), step_h_(step_h), t_label_(t_label) {
    if (values_.cols() < 1) throw std::invalid_argument("Segment: needs at least one grid point");
    if (!(step_h_ > 0.0) && values_.cols() > 1)
        throw std::invalid_argument("Segment: step must be > 0");
}

Eigen::VectorXd Segment::window_mean() const {
    const int m = points();
    if (m == 1) return values_.col(0);
    Eigen::VectorXd acc = 0.5 * (values_.col(0) + values_.col(m - 1));
    for (int j = 1; j < m - 1; ++j) acc += values_.col(j);
    return acc / static_cast<double>(m - 1);
}

double Segment::sup_norm() const {
    double best = 0.0;
    for (int j = 0; j < points(); ++j) best = std::max(best, values_.col(j).norm());
    return best;
}

double Segment::sup_norm_diff(const Segment& other) const {
    if (other.points() != points() || other.dim() != dim())
        throw std::invalid_argument("Segment: shape mismatch in sup_norm_diff");
    double best = 0.0;
    for (int j = 0; j < points(); ++j)
        best = std::max(best, (values_.col(j) - other.values_.col(j)).norm());
    return best;
}

double PeriodicCoeff::eval(double t) const {
    // Phase reduction first: fmod is exact, so t and t + k*period produce
    // identical phases (and identical values) whenever both times are
    // exactly representable. The purely periodic SAP gap is then exactly 0.
    const double phase = std::fmod(t, period) / period;
    double v = a0;
    for (std::size_t m = 0; m < cos_coef.size(); ++m)
        v += cos_coef[m] * std::cos(2.0 * M_PI * static_cast<double>(m + 1) * phase);
    for (std::size_t m = 0; m < sin_coef.size(); ++m)
        v += sin_coef[m] * std::sin(2.0 * M_PI * static_cast<double>(m + 1) * phase);
    return v;
}

double PeriodicCoeff::sup_bound() const {
    double b = std::abs(a0);
    for (double c : cos_coef) b += std::abs(c);
    for (double s : sin_coef) b += std::abs(s);
    return b;
}

bool PeriodicCoeff::is_zero() const {
    if (a0 != 0.0) return false;
    for (double c : cos_coef)
        if (c != 0.0) return false;
    for (double s : sin_coef)
        if (s != 0.0) return false;
    return true;
}

Eigen::VectorXd apply_functional(SegmentFunctional f, const Segment& seg) {
    switch (f) {
        case SegmentFunctional::ValueAtZero: return seg.at_zero();
        case SegmentFunctional::ValueAtMinusTau: return seg.at_minus_tau();
        case SegmentFunctional::WindowMean: return seg.window_mean();
    }
    throw std::invalid_argument("apply_functional: unknown functional");
}

double JumpPreset::lipschitz_bound(const LevySpec& noise, bool big_side) const {
    const double b = c.sup_bound();
    double mass = 0.0;
    for (const auto& atom : noise.atoms) {
        if (atom.is_big() != big_side) continue;
        const double r = mark_scale(atom.mark);
        mass += atom.rate * r * r;
    }
    return b * b * mass;
}

double CoefficientSet::analytic_k0(const LevySpec&) const { return h.lipschitz_bound(); }

double CoefficientSet::analytic_L(const LevySpec& noise) const {
    const double lf = f.lipschitz_bound() * f.lipschitz_bound();
    const double lg = g.lipschitz_bound(noise);
    const double lF = F.lipschitz_bound(noise, false);
    const double lG = G.lipschitz_bound(noise, true);
    return std::max(std::max(lf, lg), std::max(lF, lG));
}

void CoefficientSet::validate(const LevySpec& noise) const {
    if (!std::isfinite(declared_k0) || declared_k0 < 0.0 || declared_k0 >= 1.0)
        throw validation_error("coefficients.declared_k0 violates (H2): need k0 in (0,1)");
    if (!h.is_zero() && !(declared_k0 > 0.0))
        throw validation_error("coefficients.declared_k0 must be > 0 for a nonzero h");
    if (!std::isfinite(declared_L) || declared_L < 0.0)
        throw validation_error("coefficients.declared_L must be finite and >= 0");
    const bool any_nonzero =
        !f.is_zero() || !g.is_zero() || !F.is_zero() || !G.is_zero();
    if (any_nonzero && !(declared_L > 0.0))
        throw validation_error("coefficients.declared_L must be > 0 when any of f,g,F,G is nonzero");
    if (!(sap_omega > 0.0)) throw validation_error("coefficients.sap_omega must be > 0");
    for (const auto* per : {&h.c.periodic, &f.c.periodic, &g.c.periodic, &F.c.periodic, &G.c.periodic})
        if (!(per->period > 0.0)) throw validation_error("coefficient periodic part needs period > 0");
    for (const auto* dec : {&h.c.decay, &f.c.decay, &g.c.decay, &F.c.decay, &G.c.decay})
        if (dec->c0 != 0.0 && !(dec->p >= 1.0))
            throw validation_error("coefficient decay exponent must satisfy p >= 1");
    if (g.direction.size() != noise.dim_u)
        throw validation_error("coefficients.g.direction must have the noise dimension");
}

} // namespace nfsde
