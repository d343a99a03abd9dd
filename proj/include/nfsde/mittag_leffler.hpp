#ifndef NFSDE_MITTAG_LEFFLER_HPP
#define NFSDE_MITTAG_LEFFLER_HPP

#include <memory>

namespace nfsde {

/*
 * Two-parameter Mittag-Leffler function
 *
 *     E_{a,b}(z) = sum_{k>=0} z^k / Gamma(a k + b),   0 < a <= 2, b > 0.
 *
 * Evaluation splits on u = |z|^{1/a}:
 *
 *   u <= u_switch (=32), or z >= 0:
 *       power series summed in binary128; the largest term is ~e^u, so
 *       the absolute rounding error stays below ~1e-18 inside the
 *       switch region.
 *
 *   z < 0, u > u_switch:
 *       algebraic expansion  -sum_{k>=1} z^{-k}/Gamma(b - a k), truncated
 *       at the smallest term, plus the exponentially small branch pair
 *       (2/a) Re[ zeta^{1-b} e^zeta ], zeta = u e^{i pi/a}, which carries
 *       the decaying oscillation for 1 < a < 2 (weight 1/2 at a = 1 where
 *       the two branches coalesce, absent for a < 1). Truncation error is
 *       ~e^{-u} <= e^{-32}.
 *
 * Near the switch both regimes are evaluated and must agree to 1e-9; on
 * disagreement the series is resummed with compensated accumulation and
 * the check retried once before failing.
 */
double ml_eval(double alpha, double beta, double z);

// Reusable evaluator for many z at fixed (alpha, beta): caches the
// 1/Gamma(alpha k + beta) table so the series costs a few dozen
// multiply-adds per call. ml_eval() itself is this class plus a small
// shared table cache, so the two always agree bit-for-bit.
class MlKernel {
public:
    MlKernel(double alpha, double beta);
    double operator()(double z) const;

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }

    struct Table; // internal; defined in the implementation file

private:
    double alpha_, beta_;
    std::shared_ptr<const Table> table_;
};

namespace detail {
// Switch point in z for a given alpha: |z| = u_switch^alpha.
double ml_z_switch(double alpha);
// Individual regimes, exposed for tests.
double ml_series(double alpha, double beta, double z, bool compensated);
double ml_asymptotic(double alpha, double beta, double z);
} // namespace detail

} // namespace nfsde

#endif
