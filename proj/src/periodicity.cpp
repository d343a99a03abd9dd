#include "nfsde/periodicity.hpp"
#include "nfsde/errors.hpp"
#include "nfsde/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace nfsde {

namespace {

double sup_distance_cols(const Eigen::MatrixXd& A, int a, const Eigen::MatrixXd& B, int b, int dim,
                         int points) {
    double best = 0.0;
    for (int p = 0; p < points; ++p) {
        const double v = (A.col(a).segment(p * dim, dim) - B.col(b).segment(p * dim, dim)).norm();
        best = std::max(best, v);
    }
    return best;
}

} // namespace

double segment_sup_distance(const EmpiricalLaw& law, int a, const EmpiricalLaw& other, int b) {
    if (law.dim != other.dim || law.points != other.points)
        throw std::invalid_argument("segment_sup_distance: law shape mismatch");
    return sup_distance_cols(law.samples, a, other.samples, b, law.dim, law.points);
}

EmpiricalLaw law_at(const Ensemble& ens, double t, int first_path, int n_paths) {
    if (ens.n_paths() == 0) throw std::invalid_argument("law_at: empty ensemble");
    if (first_path < 0 || first_path + n_paths > ens.n_paths() || n_paths < 1)
        throw std::invalid_argument("law_at: path range out of bounds");
    EmpiricalLaw law;
    const Trajectory& t0 = ens.paths.front();
    law.dim = t0.dim();
    law.points = t0.history_points + 1;
    law.t_label = t;
    law.samples.resize(law.dim * law.points, n_paths);
    for (int k = 0; k < n_paths; ++k) {
        const Segment seg = segment_at(ens.paths[static_cast<std::size_t>(first_path + k)], t);
        for (int p = 0; p < law.points; ++p)
            law.samples.col(k).segment(p * law.dim, law.dim) = seg.values().col(p);
    }
    return law;
}

namespace {

GapEstimate coupled_gap(const Ensemble& ens, double t, double omega, bool truncated) {
    if (ens.n_paths() == 0) throw std::invalid_argument("gap estimator: empty ensemble");
    const int n = ens.n_paths();
    double mean = 0.0, m2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const Trajectory& traj = ens.paths[static_cast<std::size_t>(k)];
        const Segment a = segment_at(traj, t);
        const Segment b = segment_at(traj, t + omega);
        const double dist = a.sup_norm_diff(b);
        const double v = truncated ? std::min(2.0, dist) : dist * dist;
        const double delta = v - mean;
        mean += delta / static_cast<double>(k + 1);
        m2 += delta * (v - mean);
    }
    GapEstimate g;
    g.estimate = mean;
    g.n = n;
    g.std_error = n > 1 ? std::sqrt(m2 / (static_cast<double>(n) * (n - 1.0))) : 0.0;
    return g;
}

} // namespace

GapEstimate mean_square_gap(const Ensemble& ens, double t, double omega) {
    return coupled_gap(ens, t, omega, false);
}

GapEstimate truncated_moment_bound(const Ensemble& ens, double t, double omega) {
    return coupled_gap(ens, t, omega, true);
}

namespace {

// Merge exactly equal support points and drop zero-weight ones; zero
// weights cannot affect the optimum because the sup-norm distances
// satisfy the triangle inequality, so chains through unused points never
// tighten a pairwise bound.
void build_lp_inputs(const EmpiricalLaw& P, const EmpiricalLaw& Q, Eigen::VectorXd& weights,
                     Eigen::MatrixXd& dist) {
    const int np = P.size(), nq = Q.size();
    std::vector<Eigen::VectorXd> support;
    std::vector<double> w;
    auto add = [&](const Eigen::VectorXd& x, double weight) {
        for (std::size_t k = 0; k < support.size(); ++k) {
            if ((support[k] - x).isZero(0.0)) {
                w[k] += weight;
                return;
            }
        }
        support.push_back(x);
        w.push_back(weight);
    };
    for (int k = 0; k < np; ++k) add(P.samples.col(k), 1.0 / np);
    for (int k = 0; k < nq; ++k) add(Q.samples.col(k), -1.0 / nq);

    std::vector<int> keep;
    for (std::size_t k = 0; k < support.size(); ++k)
        if (std::abs(w[k]) > 0.0) keep.push_back(static_cast<int>(k));

    const int n = static_cast<int>(keep.size());
    weights.resize(n);
    dist.resize(n, n);
    for (int a = 0; a < n; ++a) {
        weights(a) = w[static_cast<std::size_t>(keep[static_cast<std::size_t>(a)])];
        dist(a, a) = 0.0;
        for (int b = 0; b < a; ++b) {
            double best = 0.0;
            const auto& xa = support[static_cast<std::size_t>(keep[static_cast<std::size_t>(a)])];
            const auto& xb = support[static_cast<std::size_t>(keep[static_cast<std::size_t>(b)])];
            for (int p = 0; p < P.points; ++p) {
                const double v = (xa.segment(p * P.dim, P.dim) - xb.segment(p * P.dim, P.dim)).norm();
                best = std::max(best, v);
            }
            dist(a, b) = dist(b, a) = best;
        }
    }
}

} // namespace

double bl_distance(const EmpiricalLaw& P, const EmpiricalLaw& Q, int lp_cap) {
    if (P.size() == 0 || Q.size() == 0)
        throw std::invalid_argument("bl_distance: empty empirical law");
    if (P.dim != Q.dim || P.points != Q.points)
        throw std::invalid_argument("bl_distance: law shape mismatch");
    if (P.size() + Q.size() > lp_cap)
        throw lp_cap_error("bl_distance: combined support " + std::to_string(P.size() + Q.size()) +
                           " exceeds the LP cap " + std::to_string(lp_cap) +
                           "; subsample the clouds");
    Eigen::VectorXd w;
    Eigen::MatrixXd d;
    build_lp_inputs(P, Q, w, d);
    if (w.size() == 0) return 0.0; // identical supports with cancelling weights
    return std::max(0.0, lipschitz_lp(w, d).objective);
}

BlGap distribution_gap(const Ensemble& ens, double t, double omega,
                       const DistributionGapOptions& opt) {
    const int n = ens.n_paths();
    if (n < 4) throw std::invalid_argument("distribution_gap: need at least 4 paths");
    const int half = n / 2;
    const int cloud = std::min(opt.cloud_size, half);
    if (2 * cloud > opt.lp_cap)
        throw lp_cap_error("distribution_gap: cloud sizes exceed the LP cap; subsample");

    // Disjoint path subsets: the two clouds must be independent, a shared
    // path set would bias d_L toward the coupled pathwise distance.
    const EmpiricalLaw P = law_at(ens, t, 0, cloud);
    const EmpiricalLaw Q = law_at(ens, t + omega, half, cloud);

    Eigen::VectorXd w0;
    Eigen::MatrixXd dist0;
    build_lp_inputs(P, Q, w0, dist0);
    LpResult base;
    if (w0.size() > 0) base = lipschitz_lp(w0, dist0);

    BlGap out;
    out.estimate = std::max(0.0, base.objective);
    out.n_per_cloud = cloud;
    out.resamples = opt.bootstrap;
    if (opt.bootstrap <= 1) return out;

    // Bootstrap over paths within each cloud. The resampled supports stay
    // inside the original ones, so only the weights change and the base
    // solve's active set is a natural warm start.
    const int np = P.size(), nq = Q.size();
    std::vector<double> values(static_cast<std::size_t>(opt.bootstrap));
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto run = [&]() {
        try {
            while (true) {
                const int rix = next.fetch_add(1);
                if (rix >= opt.bootstrap) break;
                CounterRng rng(opt.seed, static_cast<std::uint32_t>(rix), 7001);
                std::vector<int> cp(static_cast<std::size_t>(np), 0), cq(static_cast<std::size_t>(nq), 0);
                for (int k = 0; k < np; ++k)
                    cp[static_cast<std::size_t>(std::min<int>(np - 1, static_cast<int>(rng.uniform01() * np)))]++;
                for (int k = 0; k < nq; ++k)
                    cq[static_cast<std::size_t>(std::min<int>(nq - 1, static_cast<int>(rng.uniform01() * nq)))]++;
                EmpiricalLaw Pb = P, Qb = Q;
                // reweight by multiplicity: realized as repeated columns
                std::vector<int> pc, qc;
                for (int k = 0; k < np; ++k)
                    for (int c = 0; c < cp[static_cast<std::size_t>(k)]; ++c) pc.push_back(k);
                for (int k = 0; k < nq; ++k)
                    for (int c = 0; c < cq[static_cast<std::size_t>(k)]; ++c) qc.push_back(k);
                Pb.samples.resize(P.samples.rows(), static_cast<int>(pc.size()));
                Qb.samples.resize(Q.samples.rows(), static_cast<int>(qc.size()));
                for (std::size_t k = 0; k < pc.size(); ++k)
                    Pb.samples.col(static_cast<int>(k)) = P.samples.col(pc[k]);
                for (std::size_t k = 0; k < qc.size(); ++k)
                    Qb.samples.col(static_cast<int>(k)) = Q.samples.col(qc[k]);
                values[static_cast<std::size_t>(rix)] = bl_distance(Pb, Qb, opt.lp_cap);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(err_mu);
            if (!err) err = std::current_exception();
        }
    };
    const int workers = std::max(1, opt.n_workers);
    if (workers == 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        for (int wk = 0; wk < workers; ++wk) pool.emplace_back(run);
        for (auto& th : pool) th.join();
    }
    if (err) std::rethrow_exception(err);

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size() - 1);
    out.bootstrap_std_error = std::sqrt(var);
    return out;
}

double coefficient_sap_gap(const ModelSpec& model, CoefficientKind kind, double t, double omega,
                           std::span<const Segment> probes) {
    if (probes.empty()) throw std::invalid_argument("coefficient_sap_gap: empty probe set");
    const auto& co = model.coefficients;
    double worst = 0.0;
    for (const Segment& phi : probes) {
        double gap = 0.0;
        switch (kind) {
            case CoefficientKind::Neutral:
                gap = (co.h.eval(t + omega, phi) - co.h.eval(t, phi)).squaredNorm();
                break;
            case CoefficientKind::Drift:
                gap = (co.f.eval(t + omega, phi) - co.f.eval(t, phi)).squaredNorm();
                break;
            case CoefficientKind::Diffusion: {
                const Eigen::MatrixXd dg = co.g.matrix(t + omega, phi) - co.g.matrix(t, phi);
                for (int j = 0; j < model.noise.dim_u; ++j)
                    gap += model.noise.q_diag(j) * dg.col(j).squaredNorm();
                break;
            }
            case CoefficientKind::SmallJump:
            case CoefficientKind::BigJump: {
                const bool big = kind == CoefficientKind::BigJump;
                for (const auto& atom : model.noise.atoms) {
                    if (atom.is_big() != big) continue;
                    const auto& preset = big ? co.G : co.F;
                    gap += atom.rate * (preset.eval(t + omega, phi, atom.mark) -
                                        preset.eval(t, phi, atom.mark))
                                           .squaredNorm();
                }
                break;
            }
        }
        worst = std::max(worst, gap);
    }
    return worst;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "PASS";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
        case Verdict::Fail: return "FAIL";
    }
    return "?";
}

Verdict sap_decay_verdict(const std::vector<double>& estimates,
                          const std::vector<double>& std_errors, double fraction) {
    if (estimates.size() < 4 || estimates.size() != std_errors.size())
        throw std::invalid_argument("sap_decay_verdict: need >= 4 checkpoints with errors");
    const std::size_t n = estimates.size();
    const std::size_t start = n - n / 2;
    double m = 0.0, m_se = 0.0;
    for (std::size_t k = start; k < n; ++k)
        if (estimates[k] >= m) {
            m = estimates[k];
            m_se = std_errors[k];
        }
    const double first = estimates.front();
    const double first_se = std_errors.front();
    const double thr_hi = fraction * (first + 2.0 * first_se);
    // Confidently below the threshold -> Pass; confidently at or above -> Fail.
    if (m + 2.0 * m_se <= thr_hi) return Verdict::Pass;
    if (m - 2.0 * m_se >= thr_hi) return Verdict::Fail;
    return Verdict::Inconclusive;
}

PeriodicityReport analyze_ensemble(const Ensemble& ens, double omega, const AnalyzeOptions& opt) {
    PeriodicityReport rep;
    rep.omega = omega;
    rep.n_paths = ens.n_paths();
    rep.t_checkpoints = opt.checkpoints;
    for (double t : opt.checkpoints) {
        rep.ms_gaps.push_back(mean_square_gap(ens, t, omega));
        rep.trunc_bounds.push_back(truncated_moment_bound(ens, t, omega));
        rep.bl_gaps.push_back(distribution_gap(ens, t, omega, opt.dist));
    }
    std::vector<double> ms, ms_se, bl, bl_se;
    for (const auto& g : rep.ms_gaps) {
        ms.push_back(g.estimate);
        ms_se.push_back(g.std_error);
    }
    for (const auto& g : rep.bl_gaps) {
        bl.push_back(g.estimate);
        bl_se.push_back(g.bootstrap_std_error);
    }
    if (ms.size() >= 4) {
        rep.ms_verdict = sap_decay_verdict(ms, ms_se, opt.decay_fraction);
        rep.bl_verdict = sap_decay_verdict(bl, bl_se, opt.decay_fraction);
    }
    return rep;
}

} // namespace nfsde
