#ifndef NFSDE_TESTS_ML_ORACLE_HPP
#define NFSDE_TESTS_ML_ORACLE_HPP

// Independent high-precision oracle for E_{a,b}(z): straight partial-series
// summation in MPFR with a rigorous geometric tail bound. Deliberately a
// different code path and precision stack from the library implementation.

#include <mpfr.h>

#include <cmath>
#include <stdexcept>

namespace nfsde_tests {

// Sums at least `min_terms` terms at `digits` decimal digits; continues
// until the term ratio is provably below 1/2 and the geometric tail bound
// 2|t_k| drops under 10^-(digits-10).
inline double ml_series_oracle(double alpha, double beta, double z, int digits = 60,
                               int min_terms = 200) {
    const mpfr_prec_t prec = static_cast<mpfr_prec_t>(std::ceil(digits * 3.33)) + 32;
    mpfr_t sum, term, zq, arg, g, tail_tol, absterm, prev;
    mpfr_inits2(prec, sum, term, zq, arg, g, tail_tol, absterm, prev, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_d(zq, z, MPFR_RNDN);
    mpfr_set_zero(sum, 1);
    mpfr_set_ui(tail_tol, 10, MPFR_RNDN);
    mpfr_pow_si(tail_tol, tail_tol, -(digits - 10), MPFR_RNDN);
    mpfr_set_inf(prev, 1);

    bool converged = false;
    const int kmax = 20000;
    for (int k = 0; k < kmax; ++k) {
        // term = z^k / Gamma(alpha k + beta)
        mpfr_set_d(arg, alpha, MPFR_RNDN);
        mpfr_mul_ui(arg, arg, static_cast<unsigned long>(k), MPFR_RNDN);
        mpfr_add_d(arg, arg, beta, MPFR_RNDN);
        mpfr_gamma(g, arg, MPFR_RNDN);
        mpfr_pow_ui(term, zq, static_cast<unsigned long>(k), MPFR_RNDN);
        mpfr_div(term, term, g, MPFR_RNDN);
        mpfr_add(sum, sum, term, MPFR_RNDN);

        mpfr_abs(absterm, term, MPFR_RNDN);
        if (k >= min_terms) {
            // ratio check: |t_k| <= |t_{k-1}| / 2 and 2|t_k| < tail_tol.
            mpfr_t half_prev;
            mpfr_init2(half_prev, prec);
            mpfr_div_ui(half_prev, prev, 2, MPFR_RNDN);
            const bool ratio_ok = mpfr_cmp(absterm, half_prev) <= 0;
            mpfr_mul_ui(half_prev, absterm, 2, MPFR_RNDN);
            const bool tail_ok = mpfr_cmp(half_prev, tail_tol) < 0;
            mpfr_clear(half_prev);
            if (ratio_ok && tail_ok) {
                converged = true;
                break;
            }
        }
        mpfr_set(prev, absterm, MPFR_RNDN);
    }
    if (!converged) {
        mpfr_clears(sum, term, zq, arg, g, tail_tol, absterm, prev, static_cast<mpfr_ptr>(nullptr));
        throw std::runtime_error("ml_series_oracle: no convergence (argument too large?)");
    }
    const double out = mpfr_get_d(sum, MPFR_RNDN);
    mpfr_clears(sum, term, zq, arg, g, tail_tol, absterm, prev, static_cast<mpfr_ptr>(nullptr));
    return out;
}

} // namespace nfsde_tests

#endif
