#include "nfsde/sectorial.hpp"
#include "nfsde/errors.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nfsde {

SectorialSpec SectorialSpec::scalar(double a, double alpha, double mu, double theta,
                                    double C, double M) {
    SectorialSpec s;
    s.alpha = alpha;
    s.mu = mu;
    s.theta = theta;
    s.C = C;
    s.M = M;
    s.eigenvalues = Eigen::VectorXd::Constant(1, a);
    s.basis = Eigen::MatrixXd::Identity(1, 1);
    s.validate();
    return s;
}

SectorialSpec SectorialSpec::diagonalizable(Eigen::VectorXd eigenvalues, Eigen::MatrixXd basis,
                                            double alpha, double mu, double theta, double C,
                                            double M) {
    SectorialSpec s;
    s.alpha = alpha;
    s.mu = mu;
    s.theta = theta;
    s.C = C;
    s.M = M;
    s.eigenvalues = std::move(eigenvalues);
    s.basis = std::move(basis);
    s.validate();
    return s;
}

void SectorialSpec::validate() const {
    if (!std::isfinite(alpha) || !std::isfinite(mu) || !std::isfinite(theta) ||
        !std::isfinite(C) || !std::isfinite(M))
        throw std::invalid_argument("SectorialSpec: non-finite field");
    if (!(alpha > 1.0) || !(alpha <= 2.0))
        throw std::invalid_argument("SectorialSpec: alpha must be in (1, 2]");
    if (!(mu < 0.0)) throw std::invalid_argument("SectorialSpec: mu must be < 0");
    if (!(theta > 0.0)) throw std::invalid_argument("SectorialSpec: theta must be > 0");
    if (!(C >= 1.0)) throw std::invalid_argument("SectorialSpec: C must be >= 1");
    if (!(M > 0.0)) throw std::invalid_argument("SectorialSpec: M must be > 0");
    if (eigenvalues.size() == 0) throw std::invalid_argument("SectorialSpec: empty spectrum");
    if (!eigenvalues.allFinite()) throw std::invalid_argument("SectorialSpec: non-finite eigenvalue");
    if (basis.rows() != eigenvalues.size() || basis.cols() != eigenvalues.size())
        throw std::invalid_argument("SectorialSpec: basis shape does not match the spectrum");
    if (!basis.allFinite()) throw std::invalid_argument("SectorialSpec: non-finite basis");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
    if (!lu.isInvertible()) throw std::invalid_argument("SectorialSpec: basis is not invertible");
}

OperatorValue solution_operator_eval(const SectorialSpec& spec, double t) {
    spec.validate();
    if (!(t >= 0.0) || !std::isfinite(t))
        throw std::invalid_argument("solution_operator_eval: t must be finite and >= 0");
    const int d = spec.dim();
    OperatorValue out;
    out.t = t;
    if (t == 0.0) {
        out.matrix = Eigen::MatrixXd::Identity(d, d);
        return out;
    }
    MlKernel ml(spec.alpha, 1.0);
    const double ta = std::pow(t, spec.alpha);
    Eigen::VectorXd diag(d);
    for (int i = 0; i < d; ++i) diag(i) = ml(spec.eigenvalues(i) * ta);
    if (spec.is_scalar()) {
        out.matrix = Eigen::MatrixXd::Constant(1, 1, diag(0));
        return out;
    }
    out.matrix = spec.basis * diag.asDiagonal() * spec.basis.inverse();
    return out;
}

SectorReport check_sectorial(const SectorialSpec& spec) {
    SectorReport r;
    r.mu_negative = spec.mu < 0.0;
    r.angle_limit = M_PI * (1.0 - spec.alpha / 2.0);
    r.angle_ok = spec.theta > 0.0 && spec.theta < r.angle_limit;
    bool eigen_ok = true;
    for (int i = 0; i < spec.dim(); ++i) {
        const double a = spec.eigenvalues(i);
        const bool within = a <= spec.mu && spec.mu < 0.0;
        r.eigenvalue_checks.push_back({a, within});
        eigen_ok = eigen_ok && within;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(spec.basis);
    const double smin = svd.singularValues().minCoeff();
    r.basis_condition = smin > 0.0 ? svd.singularValues().maxCoeff() / smin
                                   : std::numeric_limits<double>::infinity();
    r.pass = r.mu_negative && r.angle_ok && eigen_ok;
    return r;
}

std::string SectorReport::summary() const {
    std::ostringstream os;
    os << "sector check: " << (pass ? "pass" : "FAIL") << "\n";
    os << "  mu < 0: " << (mu_negative ? "yes" : "no") << "\n";
    os << "  0 < theta < pi(1 - alpha/2) = " << angle_limit << ": " << (angle_ok ? "yes" : "no")
       << "\n";
    for (const auto& e : eigenvalue_checks)
        os << "  eigenvalue " << e.value << ": " << (e.within ? "ok" : "OUTSIDE (a <= mu < 0)")
           << "\n";
    os << "  basis condition number: " << basis_condition << "\n";
    return os.str();
}

namespace {

double spectral_norm_at(const SectorialSpec& spec, const MlKernel& ml, double t) {
    const double ta = std::pow(t, spec.alpha);
    if (spec.is_scalar()) return std::abs(ml(spec.eigenvalues(0) * ta));
    const int d = spec.dim();
    Eigen::VectorXd diag(d);
    for (int i = 0; i < d; ++i) diag(i) = ml(spec.eigenvalues(i) * ta);
    const Eigen::MatrixXd S = spec.basis * diag.asDiagonal() * spec.basis.inverse();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(S);
    return svd.singularValues().maxCoeff();
}

} // namespace

double decay_envelope(const SectorialSpec& spec, std::span<const double> t_grid) {
    return decay_envelope_report(spec, t_grid).c_emp;
}

EnvelopeReport decay_envelope_report(const SectorialSpec& spec, std::span<const double> t_grid) {
    spec.validate();
    if (t_grid.empty()) throw std::invalid_argument("decay_envelope: empty grid");
    for (double t : t_grid)
        if (!std::isfinite(t) || t < 0.0)
            throw std::invalid_argument("decay_envelope: grid must be finite and nonnegative");

    MlKernel ml(spec.alpha, 1.0);
    const std::size_t n = t_grid.size();
    std::vector<double> ratio(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = t_grid[i];
        ratio[i] = spectral_norm_at(spec, ml, t) * (1.0 + std::abs(spec.mu) * std::pow(t, spec.alpha)) /
                   spec.M;
    }

    EnvelopeReport rep;
    double running = 0.0;
    std::size_t next_mark = 0;
    for (int block = 1; block <= 8; ++block) {
        const std::size_t end = n * static_cast<std::size_t>(block) / 8;
        for (; next_mark < end; ++next_mark) running = std::max(running, ratio[next_mark]);
        rep.prefix_maxima.push_back(running);
    }
    for (; next_mark < n; ++next_mark) running = std::max(running, ratio[next_mark]);
    rep.c_emp = running;

    // Refinement stability: re-evaluate on midpoints and compare maxima.
    double refined = running;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double t = 0.5 * (t_grid[i] + t_grid[i + 1]);
        const double r = spectral_norm_at(spec, ml, t) *
                         (1.0 + std::abs(spec.mu) * std::pow(t, spec.alpha)) / spec.M;
        refined = std::max(refined, r);
    }
    rep.refine_change = running > 0.0 ? (refined - running) / running : 0.0;

    // Divergence flag: the running maximum keeps growing across the last
    // half of the horizon instead of stabilizing.
    const double mid = rep.prefix_maxima[3]; // first half
    rep.diverging = rep.c_emp > 1.2 * mid;
    return rep;
}

OperatorTable::OperatorTable(const SectorialSpec& spec, double step_h, int n_lags)
    : spec_(spec), step_h_(step_h), n_lags_(n_lags), scalar_(spec.is_scalar()),
      kernel_(spec.alpha, 1.0) {
    spec_.validate();
    if (!(step_h > 0.0)) throw std::invalid_argument("OperatorTable: step must be > 0");
    if (n_lags < 0) throw std::invalid_argument("OperatorTable: negative lag count");
    const int d = spec_.dim();
    basis_inv_ = scalar_ ? Eigen::MatrixXd::Identity(1, 1) : Eigen::MatrixXd(spec_.basis.inverse());
    diag_table_.resize(d, n_lags + 1);
    for (int j = 0; j <= n_lags; ++j) diag_table_.col(j) = diag_at_time(j * step_h);
}

Eigen::VectorXd OperatorTable::diag_at_time(double t) const {
    const int d = spec_.dim();
    Eigen::VectorXd diag(d);
    if (t == 0.0) {
        diag.setOnes();
        return diag;
    }
    const double ta = std::pow(t, spec_.alpha);
    for (int i = 0; i < d; ++i) diag(i) = kernel_(spec_.eigenvalues(i) * ta);
    return diag;
}

Eigen::VectorXd OperatorTable::apply(int lag, const Eigen::VectorXd& v) const {
    if (lag < 0 || lag > n_lags_) throw std::invalid_argument("OperatorTable: lag out of range");
    if (scalar_) return diag_table_(0, lag) * v;
    return spec_.basis * (diag_table_.col(lag).asDiagonal() * (basis_inv_ * v));
}

Eigen::VectorXd OperatorTable::apply_at(double t, const Eigen::VectorXd& v) const {
    if (!(t >= 0.0)) throw std::invalid_argument("OperatorTable: negative lag time");
    const Eigen::VectorXd diag = diag_at_time(t);
    if (scalar_) return diag(0) * v;
    return spec_.basis * (diag.asDiagonal() * (basis_inv_ * v));
}

Eigen::MatrixXd OperatorTable::matrix(int lag) const {
    if (lag < 0 || lag > n_lags_) throw std::invalid_argument("OperatorTable: lag out of range");
    if (scalar_) return Eigen::MatrixXd::Constant(1, 1, diag_table_(0, lag));
    return spec_.basis * diag_table_.col(lag).asDiagonal() * basis_inv_;
}

} // namespace nfsde
