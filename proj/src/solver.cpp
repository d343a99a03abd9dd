#include "nfsde/solver.hpp"
#include "nfsde/errors.hpp"
#include "nfsde/rng.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace nfsde {

namespace {

bool divides(double step, double span, double rel_tol = 1e-12) {
    const double ratio = span / step;
    const double r = std::round(ratio);
    return r >= 1.0 && std::abs(ratio - r) <= rel_tol * std::max(1.0, ratio);
}

} // namespace

void SolverConfig::validate(const ModelSpec& model) const {
    if (!(step_h > 0.0) || !std::isfinite(step_h))
        throw validation_error("solver.step_h must be > 0");
    if (!(horizon_T > 0.0) || !std::isfinite(horizon_T))
        throw validation_error("solver.horizon_T must be > 0");
    if (!divides(step_h, model.tau))
        throw validation_error("solver.step_h does not divide tau (grid alignment)");
    if (!divides(step_h, model.omega))
        throw validation_error("solver.step_h does not divide omega (grid alignment)");
    if (!divides(step_h, horizon_T))
        throw validation_error("solver.step_h does not divide horizon_T");
    if (picard_max_iter < 1) throw validation_error("solver.picard_max_iter must be >= 1");
    if (!(neutral_fixed_point_tol > 0.0))
        throw validation_error("solver.neutral_fixed_point_tol must be > 0");
    if (neutral_max_iter < 1) throw validation_error("solver.neutral_max_iter must be >= 1");
}

int SolverConfig::main_steps() const { return static_cast<int>(std::lround(horizon_T / step_h)); }

int Trajectory::index_of(double t) const {
    const double pos = (t + tau) / step_h;
    const long j = std::lround(pos);
    if (j < 0 || j >= static_cast<long>(grid.size()) ||
        std::abs(pos - static_cast<double>(j)) > 1e-9 * std::max(1.0, std::abs(pos)))
        throw std::invalid_argument("Trajectory: time is not on the grid");
    return static_cast<int>(j);
}

Segment segment_at(const Trajectory& traj, double t) {
    if (t < -1e-12 || t > traj.horizon() + 1e-12)
        throw std::invalid_argument("segment_at: t outside [0, T]");
    const int j = traj.index_of(t);
    const int m = traj.history_points + 1;
    return Segment(traj.values.middleCols(j - traj.history_points, m), traj.step_h, t);
}

namespace {

/*
 * Shared state for both schemes. The discretized mild equation at the
 * main grid point t_j reads
 *
 *   x(t_j) = S(t_j)(phi(0) + h(0,phi)) - h(t_j, x_{t_j})
 *          + sum_{i<j} S(t_j - t_i) [ f(t_i, x_{t_i}) dt
 *                                     + g(t_i, x_{t_i}) dw_i
 *                                     - dt * comp(t_i, x_{t_i}) ]
 *          + sum_{events s_e, i_e < j} S(t_j - s_e) [F|G](s_e, x_{t_{i_e}}, u_e)
 *
 * Left-point evaluation throughout: comp is the small-jump compensator
 * rate, an event in (t_i, t_{i+1}] uses the segment at t_i and takes
 * effect at t_{i+1}, with the exact event time inside the kernel lag.
 * Grid-lag kernel values come from one shared table; per-event kernel
 * rows are cached once per noise path and reused across Picard iterations.
 * The whole convolution runs in eigen-coordinates of A.
 */
class MildSweep {
public:
    MildSweep(const ModelSpec& model, const SolverConfig& cfg, const NoisePath& noise)
        : model_(model), cfg_(cfg), noise_(noise), d_(model.dim()),
          m0_(static_cast<int>(std::lround(model.tau / cfg.step_h))), n_(cfg.main_steps()),
          table_(model.sectorial, cfg.step_h, n_) {
        if (noise.steps() != n_)
            throw std::invalid_argument("solver: noise grid does not match the solver grid");
        for (int j = 0; j <= n_; ++j) {
            const double expect = j * cfg.step_h;
            if (std::abs(noise.grid[static_cast<std::size_t>(j)] - expect) >
                1e-9 * std::max(1.0, expect))
                throw std::invalid_argument("solver: noise grid does not match the solver grid");
        }
        scalar_ = table_.scalar();

        phi_values_ = model.phi.materialize(model.tau, cfg.step_h);
        const Segment phi_seg(phi_values_, cfg.step_h, 0.0);
        initial_hat_ = to_eigen(phi_seg.at_zero() + model.coefficients.h.eval(0.0, phi_seg));

        for (const auto& atom : model.noise.atoms)
            if (!atom.is_big()) has_small_atoms_ = true;

        // Event slot: s_e in (t_i, t_{i+1}] with interval index i; the event
        // first affects x at grid step i+1.
        events_.reserve(noise.events.size());
        for (const auto& ev : noise.events) {
            EventSlot slot;
            slot.time = ev.time;
            slot.atom = ev.atom;
            int i = static_cast<int>(std::ceil(ev.time / cfg.step_h - 1e-12)) - 1;
            slot.interval = std::max(0, std::min(i, n_ - 1));
            events_.push_back(slot);
        }

        // Kernel rows at exact event lags (eigen-coordinate diagonals).
        kernel_rows_.resize(events_.size());
        for (std::size_t e = 0; e < events_.size(); ++e) {
            const auto& ev = events_[e];
            const int first_j = ev.interval + 1;
            Eigen::MatrixXd row(d_, n_ - first_j + 1);
            for (int j = first_j; j <= n_; ++j) {
                const double lag = std::max(j * cfg.step_h - ev.time, 0.0);
                row.col(j - first_j) = table_.diag_at(lag);
            }
            kernel_rows_[e] = std::move(row);
        }
    }

    int main_steps() const { return n_; }
    std::size_t event_count() const { return events_.size(); }
    int event_interval(std::size_t e) const { return events_[e].interval; }

    Trajectory empty_trajectory() const {
        Trajectory traj;
        traj.step_h = cfg_.step_h;
        traj.tau = model_.tau;
        traj.history_points = m0_;
        const int total = m0_ + n_ + 1;
        traj.grid.resize(static_cast<std::size_t>(total));
        for (int j = 0; j < total; ++j)
            traj.grid[static_cast<std::size_t>(j)] = (j - m0_) * cfg_.step_h;
        traj.values.setZero(d_, total);
        traj.values.leftCols(m0_ + 1) = phi_values_;
        traj.jump_marks.assign(static_cast<std::size_t>(total), 0);
        for (const auto& ev : events_)
            traj.jump_marks[static_cast<std::size_t>(m0_ + ev.interval + 1)] += 1;
        return traj;
    }

    // f dt + g dw - dt*comp at step i, from `source`'s segment, in eigen-coordinates.
    Eigen::VectorXd step_integrand(const Trajectory& source, int i) const {
        const double t = i * cfg_.step_h;
        const Segment seg = segment_at(source, t);
        const auto& co = model_.coefficients;
        Eigen::VectorXd v = Eigen::VectorXd::Zero(d_);
        if (!co.f.is_zero()) v += cfg_.step_h * co.f.eval(t, seg);
        if (!co.g.is_zero()) v += co.g.apply(t, seg, noise_.wiener_increments.col(i));
        if (has_small_atoms_ && !co.F.is_zero()) {
            Eigen::VectorXd comp = Eigen::VectorXd::Zero(d_);
            for (const auto& atom : model_.noise.atoms)
                if (!atom.is_big()) comp += atom.rate * co.F.eval(t, seg, atom.mark);
            v -= cfg_.step_h * comp;
        }
        return to_eigen(v);
    }

    // F or G at the event from the pre-jump segment, in eigen-coordinates.
    Eigen::VectorXd jump_integrand(const Trajectory& source, std::size_t e) const {
        const auto& ev = events_[e];
        const Segment seg = segment_at(source, ev.interval * cfg_.step_h);
        const auto& atom = model_.noise.atoms[static_cast<std::size_t>(ev.atom)];
        const auto& co = model_.coefficients;
        return to_eigen(atom.is_big() ? co.G.eval(ev.time, seg, atom.mark)
                                      : co.F.eval(ev.time, seg, atom.mark));
    }

    // Everything except the neutral correction, in H-coordinates.
    // integrands: d x n (columns 0..j-1 used); jumps: d x #events, column e
    // used once e's interval < j.
    Eigen::VectorXd explicit_rhs(int j, const Eigen::MatrixXd& integrands,
                                 const Eigen::MatrixXd& jumps, std::size_t events_ready) const {
        Eigen::VectorXd acc(d_);
        for (int r = 0; r < d_; ++r) acc(r) = table_.diag_entry(r, j) * initial_hat_(r);
        for (int i = 0; i < j; ++i) {
            const int lag = j - i;
            for (int r = 0; r < d_; ++r) acc(r) += table_.diag_entry(r, lag) * integrands(r, i);
        }
        for (std::size_t e = 0; e < events_ready; ++e) {
            const int first_j = events_[e].interval + 1;
            if (j < first_j) continue;
            acc += kernel_rows_[e].col(j - first_j).cwiseProduct(jumps.col(static_cast<int>(e)));
        }
        return from_eigen(acc);
    }

    // Resolve x(t_j) = rhs - h(t_j, x_{t_j}); the theta = 0 slot of the
    // segment is the unknown, k0 < 1 makes this a contraction.
    void solve_neutral(Trajectory& traj, int j, const Eigen::VectorXd& rhs) const {
        const int col = m0_ + j;
        const auto& co = model_.coefficients;
        if (co.h.is_zero()) {
            traj.values.col(col) = rhs;
            return;
        }
        const double t = j * cfg_.step_h;
        Segment seg(traj.values.middleCols(col - m0_, m0_ + 1), cfg_.step_h, t);
        Eigen::VectorXd y = traj.values.col(col - 1); // warm start at the previous grid value
        seg.values().col(m0_) = y;
        bool done = false;
        for (int it = 0; it < cfg_.neutral_max_iter; ++it) {
            const Eigen::VectorXd y_next = rhs - co.h.eval(t, seg);
            const double delta = (y_next - y).norm();
            y = y_next;
            seg.values().col(m0_) = y;
            if (delta <= cfg_.neutral_fixed_point_tol) {
                done = true;
                break;
            }
        }
        if (!done)
            throw solver_error("neutral fixed point did not converge in neutral_max_iter steps");
        const double residual = (y - (rhs - co.h.eval(t, seg))).norm();
        traj.neutral_residual_max = std::max(traj.neutral_residual_max, residual);
        traj.values.col(col) = y;
    }

    Eigen::MatrixXd integrand_buffer() const { return Eigen::MatrixXd::Zero(d_, std::max(n_, 1)); }
    Eigen::MatrixXd jump_buffer() const {
        return Eigen::MatrixXd::Zero(d_, std::max<int>(static_cast<int>(events_.size()), 1));
    }

    // Explicit Picard seed x^0(t_j) = S(t_j)(phi(0) + h(0,phi)), j >= 1.
    void fill_picard_seed(Trajectory& traj) const {
        for (int j = 1; j <= n_; ++j) {
            Eigen::VectorXd v(d_);
            for (int r = 0; r < d_; ++r) v(r) = table_.diag_entry(r, j) * initial_hat_(r);
            traj.values.col(m0_ + j) = from_eigen(v);
        }
    }

    int history_points() const { return m0_; }

private:
    Eigen::VectorXd to_eigen(const Eigen::VectorXd& v) const {
        return scalar_ ? v : Eigen::VectorXd(table_.basis_inverse() * v);
    }
    Eigen::VectorXd from_eigen(const Eigen::VectorXd& v) const {
        return scalar_ ? v : Eigen::VectorXd(model_.sectorial.basis * v);
    }

    struct EventSlot {
        double time = 0.0;
        int atom = 0;
        int interval = 0;
    };

    const ModelSpec& model_;
    const SolverConfig& cfg_;
    const NoisePath& noise_;
    int d_, m0_, n_;
    OperatorTable table_;
    Eigen::MatrixXd phi_values_;
    Eigen::VectorXd initial_hat_;
    std::vector<EventSlot> events_;
    std::vector<Eigen::MatrixXd> kernel_rows_;
    bool scalar_ = true;
    bool has_small_atoms_ = false;
};

} // namespace

Trajectory simulate_mild(const ModelSpec& model, const SolverConfig& cfg, const NoisePath& noise) {
    model.validate();
    cfg.validate(model);
    MildSweep sweep(model, cfg, noise);
    Trajectory traj = sweep.empty_trajectory();

    Eigen::MatrixXd integrands = sweep.integrand_buffer();
    Eigen::MatrixXd jumps = sweep.jump_buffer();
    std::size_t events_ready = 0;
    for (int j = 1; j <= sweep.main_steps(); ++j) {
        const int i = j - 1;
        integrands.col(i) = sweep.step_integrand(traj, i);
        // Events are interval-sorted; those landing in (t_i, t_{i+1}] only
        // need the already-final segment at t_i.
        while (events_ready < sweep.event_count() &&
               sweep.event_interval(events_ready) <= i) {
            jumps.col(static_cast<int>(events_ready)) =
                sweep.jump_integrand(traj, events_ready);
            ++events_ready;
        }
        sweep.solve_neutral(traj, j, sweep.explicit_rhs(j, integrands, jumps, events_ready));
    }
    return traj;
}

double mild_residual(const ModelSpec& model, const SolverConfig& cfg, const NoisePath& noise,
                     const Trajectory& traj) {
    model.validate();
    cfg.validate(model);
    MildSweep sweep(model, cfg, noise);
    Eigen::MatrixXd integrands = sweep.integrand_buffer();
    Eigen::MatrixXd jumps = sweep.jump_buffer();
    for (int i = 0; i < sweep.main_steps(); ++i) integrands.col(i) = sweep.step_integrand(traj, i);
    for (std::size_t e = 0; e < sweep.event_count(); ++e)
        jumps.col(static_cast<int>(e)) = sweep.jump_integrand(traj, e);
    double worst = 0.0;
    const int m0 = sweep.history_points();
    for (int j = 1; j <= sweep.main_steps(); ++j) {
        const Eigen::VectorXd rhs =
            sweep.explicit_rhs(j, integrands, jumps, sweep.event_count());
        const Segment seg = segment_at(traj, j * cfg.step_h);
        const Eigen::VectorXd expect = rhs - model.coefficients.h.eval(j * cfg.step_h, seg);
        worst = std::max(worst, (traj.values.col(m0 + j) - expect).norm());
    }
    return worst;
}

std::pair<Trajectory, PicardDiagnostics> picard_iterate(const ModelSpec& model,
                                                        const SolverConfig& cfg,
                                                        const NoisePath& noise) {
    model.validate();
    cfg.validate(model);
    MildSweep sweep(model, cfg, noise);
    const int n = sweep.main_steps();
    const int m0 = sweep.history_points();

    Trajectory prev = sweep.empty_trajectory();
    sweep.fill_picard_seed(prev);

    PicardDiagnostics diag;
    Trajectory current = sweep.empty_trajectory();
    Eigen::MatrixXd integrands = sweep.integrand_buffer();
    Eigen::MatrixXd jumps = sweep.jump_buffer();

    for (int iter = 1; iter <= cfg.picard_max_iter; ++iter) {
        // All convolution inputs come from the previous iterate.
        for (int i = 0; i < n; ++i) integrands.col(i) = sweep.step_integrand(prev, i);
        for (std::size_t e = 0; e < sweep.event_count(); ++e)
            jumps.col(static_cast<int>(e)) = sweep.jump_integrand(prev, e);

        current = sweep.empty_trajectory();
        for (int j = 1; j <= n; ++j)
            sweep.solve_neutral(current, j,
                                sweep.explicit_rhs(j, integrands, jumps, sweep.event_count()));

        double dsup = 0.0;
        for (int j = 0; j <= n; ++j)
            dsup = std::max(dsup,
                            (current.values.col(m0 + j) - prev.values.col(m0 + j)).squaredNorm());
        diag.sup_diffs.push_back(dsup);
        diag.iterations_run = iter;
        std::swap(prev, current);
        // D_n is a squared sup-difference; square the norm-level tolerance.
        if (dsup <= cfg.neutral_fixed_point_tol * cfg.neutral_fixed_point_tol) {
            diag.converged = true;
            break;
        }
    }
    return {std::move(prev), std::move(diag)};
}

Ensemble run_ensemble(const ModelSpec& model, const SolverConfig& cfg, int n_paths,
                      std::uint64_t master_seed, int n_workers) {
    if (n_paths < 1) throw std::invalid_argument("run_ensemble: n_paths must be >= 1");
    model.validate();
    cfg.validate(model);

    Ensemble ens;
    ens.model = std::make_shared<ModelSpec>(model);
    ens.config = cfg;
    ens.master_seed = master_seed;
    ens.path_seeds.resize(static_cast<std::size_t>(n_paths));
    ens.paths.resize(static_cast<std::size_t>(n_paths));
    const bool picard = cfg.scheme == SolverConfig::Scheme::Picard;
    if (picard) ens.picard.resize(static_cast<std::size_t>(n_paths));

    for (int i = 0; i < n_paths; ++i)
        ens.path_seeds[static_cast<std::size_t>(i)] =
            derive_path_seed(master_seed, static_cast<std::uint64_t>(i));

    std::vector<double> grid(static_cast<std::size_t>(cfg.main_steps()) + 1);
    for (std::size_t j = 0; j < grid.size(); ++j) grid[j] = static_cast<double>(j) * cfg.step_h;

    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto worker = [&]() {
        try {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= n_paths) break;
                const NoisePath noise = sample_path(ens.model->noise, grid,
                                                    ens.path_seeds[static_cast<std::size_t>(i)]);
                if (picard) {
                    auto [traj, d] = picard_iterate(*ens.model, cfg, noise);
                    ens.paths[static_cast<std::size_t>(i)] = std::move(traj);
                    ens.picard[static_cast<std::size_t>(i)] = std::move(d);
                } else {
                    ens.paths[static_cast<std::size_t>(i)] = simulate_mild(*ens.model, cfg, noise);
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mu);
            if (!first_error) first_error = std::current_exception();
        }
    };

    const int workers = std::max(1, n_workers);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return ens;
}

} // namespace nfsde
