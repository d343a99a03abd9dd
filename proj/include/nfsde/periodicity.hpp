#ifndef NFSDE_PERIODICITY_HPP
#define NFSDE_PERIODICITY_HPP

#include "nfsde/lp.hpp"
#include "nfsde/solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nfsde {

// Sample cloud of segments at a fixed time: column k is one segment
// flattened to its m grid points in H; the metric between samples is the
// grid sup-norm (max over points of the H-norm).
struct EmpiricalLaw {
    Eigen::MatrixXd samples; // (dim*points) x n
    int dim = 0;
    int points = 0;
    double t_label = 0.0;

    int size() const { return static_cast<int>(samples.cols()); }
};

double segment_sup_distance(const EmpiricalLaw& law, int a, const EmpiricalLaw& other, int b);

EmpiricalLaw law_at(const Ensemble& ens, double t, int first_path, int n_paths);

struct GapEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    int n = 0;
};

// Coupled pathwise mean of ||x_{t+omega} - x_t||_C^2 across the ensemble.
GapEstimate mean_square_gap(const Ensemble& ens, double t, double omega);

// Coupled pathwise mean of min(2, ||x_{t+omega} - x_t||_C).
GapEstimate truncated_moment_bound(const Ensemble& ens, double t, double omega);

// Exact empirical bounded-Lipschitz distance via the pairwise LP.
double bl_distance(const EmpiricalLaw& P, const EmpiricalLaw& Q, int lp_cap = 1000);

struct BlGap {
    double estimate = 0.0;
    double bootstrap_std_error = 0.0;
    int n_per_cloud = 0;
    int resamples = 0;
};

struct DistributionGapOptions {
    int cloud_size = 120;    // per side, drawn from disjoint path subsets
    int bootstrap = 200;     // resamples for the stderr
    int lp_cap = 1000;
    std::uint64_t seed = 2024;
    int n_workers = 1;
};

// d_L between the laws at t and t+omega, estimated from disjoint path
// subsets (first half of the ensemble at t, second half at t+omega) with
// a paths-resampling bootstrap standard error.
BlGap distribution_gap(const Ensemble& ens, double t, double omega,
                       const DistributionGapOptions& opt = {});

enum class CoefficientKind { Neutral, Drift, Diffusion, SmallJump, BigJump };

// Coefficient-level (uniform / Poisson) SAP gap at time t over a probe
// set: squared difference sup over probes, with the Q-weighted norm for g
// and the nu-integrated sums for F and G on their threshold sides.
double coefficient_sap_gap(const ModelSpec& model, CoefficientKind kind, double t, double omega,
                           std::span<const Segment> probes);

enum class Verdict { Pass, Inconclusive, Fail };
std::string to_string(Verdict v);

struct PeriodicityReport {
    std::vector<double> t_checkpoints;
    std::vector<GapEstimate> ms_gaps;
    std::vector<GapEstimate> trunc_bounds;
    std::vector<BlGap> bl_gaps;
    double omega = 0.0;
    int n_paths = 0;
    Verdict ms_verdict = Verdict::Inconclusive;
    Verdict bl_verdict = Verdict::Inconclusive;
};

// Finite-horizon decay verdict: the running max of the last half of the
// checkpoints is compared against `fraction` times the first checkpoint,
// with 2-SE bands deciding Pass / Fail / Inconclusive. Never claims the
// mathematical limit.
Verdict sap_decay_verdict(const std::vector<double>& estimates,
                          const std::vector<double>& std_errors, double fraction = 0.25);

struct AnalyzeOptions {
    std::vector<double> checkpoints{5.0, 10.0, 20.0, 40.0, 80.0};
    double decay_fraction = 0.25;
    DistributionGapOptions dist;
};

PeriodicityReport analyze_ensemble(const Ensemble& ens, double omega, const AnalyzeOptions& opt);

} // namespace nfsde

#endif
