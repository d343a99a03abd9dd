#include "nfsde/mittag_leffler.hpp"
#include "nfsde/errors.hpp"

#include <quadmath.h>

#include <cmath>
#include <complex>
#include <list>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace nfsde {

namespace {

constexpr double kUSwitch = 32.0;       // switch in u = |z|^{1/alpha}
constexpr double kUSeriesMax = 40.0;    // series stays accurate to ~1e-15 up to here
constexpr double kBoundaryBand = 1.15;  // cross-check band above the switch (in |z|)
constexpr double kBoundaryAgree = 1e-9;

void check_args(double alpha, double beta, double z) {
    if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(z))
        throw std::invalid_argument("ml_eval: non-finite argument");
    if (!(alpha > 0.0) || !(alpha <= 2.0))
        throw std::invalid_argument("ml_eval: alpha must be in (0, 2]");
    if (!(beta > 0.0))
        throw std::invalid_argument("ml_eval: beta must be > 0");
}

// sin(pi*x) with exact period reduction.
double sinpi(double x) {
    const double n = std::round(x);
    const double r = x - n;
    const double s = std::sin(M_PI * r);
    return (static_cast<long long>(n) % 2 != 0) ? -s : s;
}

} // namespace

struct MlKernel::Table {
    double alpha = 0.0, beta = 0.0;
    std::vector<__float128> inv_gamma; // 1/Gamma(alpha k + beta), k = 0..K
};

namespace {

std::shared_ptr<const MlKernel::Table> build_table(double alpha, double beta) {
    auto t = std::make_shared<MlKernel::Table>();
    t->alpha = alpha;
    t->beta = beta;
    // Series terms become negligible once alpha*k exceeds ~3*u_max; pad
    // generously, the table is built once per (alpha, beta).
    const int kmax = static_cast<int>((4.0 * kUSeriesMax + 40.0) / alpha) + 8;
    t->inv_gamma.resize(static_cast<std::size_t>(kmax) + 1);
    for (int k = 0; k <= kmax; ++k) {
        const __float128 arg = static_cast<__float128>(alpha) * k + static_cast<__float128>(beta);
        t->inv_gamma[static_cast<std::size_t>(k)] = expq(-lgammaq(arg));
    }
    return t;
}

// Small keyed cache so scattered ml_eval calls do not rebuild tables.
std::shared_ptr<const MlKernel::Table> cached_table(double alpha, double beta) {
    static std::mutex mu;
    static std::list<std::shared_ptr<const MlKernel::Table>> cache;
    std::lock_guard<std::mutex> lock(mu);
    for (auto it = cache.begin(); it != cache.end(); ++it) {
        if ((*it)->alpha == alpha && (*it)->beta == beta) {
            auto hit = *it;
            cache.erase(it);
            cache.push_front(hit);
            return hit;
        }
    }
    auto fresh = build_table(alpha, beta);
    cache.push_front(fresh);
    if (cache.size() > 16) cache.pop_back();
    return fresh;
}

// Power series over a prebuilt 1/Gamma table. Binary128 accumulation;
// optional second-order (Neumaier) compensation for the retry path.
double series_sum(const MlKernel::Table& tab, double z, bool compensated) {
    const __float128 zq = z;
    __float128 sum = 0, comp = 0, zpow = 1, maxabs = 0;
    const std::size_t n = tab.inv_gamma.size();
    int tiny_run = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const __float128 term = zpow * tab.inv_gamma[k];
        if (compensated) {
            const __float128 t = sum + term;
            if (fabsq(sum) >= fabsq(term))
                comp += (sum - t) + term;
            else
                comp += (term - t) + sum;
            sum = t;
        } else {
            sum += term;
        }
        const __float128 a = fabsq(term);
        if (a > maxabs) maxabs = a;
        // Terms decay superexponentially past the peak; three consecutive
        // negligible terms end the loop.
        if (a < 1e-40Q * (maxabs + 1e-40Q) && k > 2) {
            if (++tiny_run >= 3) break;
        } else {
            tiny_run = 0;
        }
        zpow *= zq;
    }
    return static_cast<double>(sum + comp);
}

// Algebraic expansion plus exponential branch pair for z <= -z_switch.
double asymptotic_sum(double alpha, double beta, double z) {
    const double x = -z;
    // -sum_{k>=1} z^{-k} / Gamma(beta - alpha k), adaptive truncation at
    // the first term that stops decreasing (optimal truncation).
    long double sum = 0.0L;
    long double zinv_pow = 1.0L;
    long double prev_mag = HUGE_VALL;
    for (int k = 1; k <= 80; ++k) {
        zinv_pow /= static_cast<long double>(z);
        const double w = beta - alpha * k;
        // 1/Gamma(w) = Gamma(1-w) sin(pi w) / pi (finite at the poles).
        const double sp = sinpi(w);
        long double inv_gamma = 0.0L;
        if (sp != 0.0)
            inv_gamma = expl(static_cast<long double>(std::lgamma(1.0 - w))) *
                        static_cast<long double>(sp) / M_PI;
        const long double term = -zinv_pow * inv_gamma;
        const long double mag = fabsl(term);
        if (mag > prev_mag) break;
        sum += term;
        if (mag > 0.0L) prev_mag = mag;
    }
    // Branch pair zeta = x^{1/alpha} e^{+-i pi/alpha}; present only when
    // the branch argument lies on the principal sheet.
    const double branch_arg = M_PI / alpha;
    double weight = 0.0;
    if (branch_arg < M_PI)
        weight = 1.0;
    else if (branch_arg == M_PI)
        weight = 0.5; // alpha == 1: the conjugate branches coincide
    double expo = 0.0;
    if (weight > 0.0) {
        const std::complex<double> zeta = std::polar(std::pow(x, 1.0 / alpha), branch_arg);
        const std::complex<double> v = std::pow(zeta, 1.0 - beta) * std::exp(zeta);
        expo = (2.0 * weight / alpha) * v.real();
    }
    return static_cast<double>(sum) + expo;
}

// Large positive arguments: every term is positive so plain long double
// is enough; the table is sized for the negative-axis regime only.
double positive_series_ld(double alpha, double beta, double z) {
    const long double logz = logl(static_cast<long double>(z));
    long double sum = 0.0L, maxterm = 0.0L;
    const double peak_k = (std::pow(z, 1.0 / alpha) + beta) / alpha;
    for (int k = 0; k < 100000; ++k) {
        const long double term =
            expl(k * logz - lgammal(static_cast<long double>(alpha) * k +
                                    static_cast<long double>(beta)));
        sum += term;
        if (term > maxterm) maxterm = term;
        if (k > peak_k && term < 1e-25L * maxterm) break;
    }
    return static_cast<double>(sum);
}

double eval_with_table(const MlKernel::Table& tab, double z) {
    const double alpha = tab.alpha;
    const double beta = tab.beta;
    check_args(alpha, beta, z);
    if (z == 0.0) return static_cast<double>(tab.inv_gamma[0]);

    const double zswitch = std::pow(kUSwitch, alpha);
    if (z > 0.0) {
        const double u = std::pow(z, 1.0 / alpha);
        if (u <= kUSeriesMax) return series_sum(tab, z, false);
        if (u > 705.0) return HUGE_VAL;
        return positive_series_ld(alpha, beta, z);
    }
    if (-z <= zswitch) {
        return series_sum(tab, z, false);
    }

    const double asym = asymptotic_sum(alpha, beta, z);
    if (-z <= kBoundaryBand * zswitch) {
        // Cancellation-zone guard: both regimes are valid here and must agree.
        double series = series_sum(tab, z, false);
        if (std::abs(series - asym) > kBoundaryAgree) {
            series = series_sum(tab, z, true); // widen precision, retry once
            if (std::abs(series - asym) > kBoundaryAgree)
                throw eval_error("ml_eval: series/asymptotic disagreement near the switch");
        }
        return series;
    }
    return asym;
}

} // namespace

MlKernel::MlKernel(double alpha, double beta) : alpha_(alpha), beta_(beta) {
    check_args(alpha, beta, 0.0);
    table_ = cached_table(alpha, beta);
}

double MlKernel::operator()(double z) const { return eval_with_table(*table_, z); }

double ml_eval(double alpha, double beta, double z) {
    check_args(alpha, beta, z);
    return eval_with_table(*cached_table(alpha, beta), z);
}

namespace detail {

double ml_z_switch(double alpha) { return std::pow(kUSwitch, alpha); }

double ml_series(double alpha, double beta, double z, bool compensated) {
    check_args(alpha, beta, z);
    return series_sum(*cached_table(alpha, beta), z, compensated);
}

double ml_asymptotic(double alpha, double beta, double z) {
    check_args(alpha, beta, z);
    if (!(z < 0.0)) throw std::invalid_argument("ml_asymptotic: requires z < 0");
    return asymptotic_sum(alpha, beta, z);
}

} // namespace detail

} // namespace nfsde
