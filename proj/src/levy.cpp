#include "nfsde/levy.hpp"
#include "nfsde/errors.hpp"
#include "nfsde/rng.hpp"

#include <algorithm>
#include <cmath>

namespace nfsde {

void LevySpec::validate() const {
    if (dim_u < 1) throw validation_error("noise.dim must be >= 1");
    if (drift.size() != dim_u) throw validation_error("noise.drift has wrong dimension");
    if (!drift.allFinite()) throw validation_error("noise.drift must be finite");
    if (q_diag.size() != dim_u) throw validation_error("noise.q_diag has wrong dimension");
    for (int i = 0; i < q_diag.size(); ++i)
        if (!std::isfinite(q_diag(i)) || q_diag(i) < 0.0)
            throw validation_error("noise.q_diag entries must be finite and >= 0");
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        const auto& a = atoms[k];
        if (a.mark.size() != dim_u)
            throw validation_error("noise.atoms[" + std::to_string(k) + "].mark has wrong dimension");
        if (!a.mark.allFinite())
            throw validation_error("noise.atoms[" + std::to_string(k) + "].mark must be finite");
        if (a.mark.norm() == 0.0)
            throw validation_error("noise.atoms[" + std::to_string(k) + "].mark must be nonzero");
        if (!std::isfinite(a.rate) || !(a.rate > 0.0))
            throw validation_error("noise.atoms[" + std::to_string(k) + "].rate must be > 0");
    }
}

double LevySpec::total_rate() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.rate;
    return s;
}

double big_jump_intensity(const LevySpec& spec) {
    double b = 0.0;
    for (const auto& a : spec.atoms)
        if (a.is_big()) b += a.rate;
    return b;
}

Eigen::VectorXd small_jump_compensator(
    const LevySpec& spec, const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& integrand) {
    Eigen::VectorXd sum;
    bool first = true;
    for (const auto& a : spec.atoms) {
        if (a.is_big()) continue;
        Eigen::VectorXd v = a.rate * integrand(a.mark);
        if (first) {
            sum = v;
            first = false;
        } else {
            sum += v;
        }
    }
    if (first) return Eigen::VectorXd();
    return sum;
}

namespace {

// Wiener increments live on substream 0, atom k on substream 1 + k, so
// the realized path does not depend on how many draws other components
// consume.
constexpr std::uint32_t kWienerPurpose = 0;

} // namespace

NoisePath sample_path(const LevySpec& spec, std::span<const double> grid, std::uint64_t seed) {
    spec.validate();
    if (grid.size() < 1) throw validation_error("sample_path: empty grid");
    if (grid[0] != 0.0) throw validation_error("sample_path: grid must start at 0");
    for (std::size_t j = 1; j < grid.size(); ++j)
        if (!(grid[j] > grid[j - 1]) || !std::isfinite(grid[j]))
            throw validation_error("sample_path: grid must be strictly increasing and finite");

    NoisePath path;
    path.seed = seed;
    path.grid.assign(grid.begin(), grid.end());
    const int n_steps = static_cast<int>(grid.size()) - 1;
    const double horizon = grid.empty() ? 0.0 : grid[grid.size() - 1];

    path.wiener_increments.resize(spec.dim_u, n_steps);
    CounterRng wiener_rng(seed, 0, kWienerPurpose);
    for (int j = 0; j < n_steps; ++j) {
        const double dt = grid[static_cast<std::size_t>(j) + 1] - grid[static_cast<std::size_t>(j)];
        for (int i = 0; i < spec.dim_u; ++i) {
            const double sd = std::sqrt(spec.q_diag(i) * dt);
            path.wiener_increments(i, j) = sd != 0.0 ? sd * wiener_rng.normal() : 0.0;
        }
    }

    for (std::size_t k = 0; k < spec.atoms.size(); ++k) {
        CounterRng atom_rng(seed, 0, static_cast<std::uint32_t>(1 + k));
        const double rate = spec.atoms[k].rate;
        double t = 0.0;
        while (true) {
            t += atom_rng.exponential(rate);
            if (!(t <= horizon)) break;
            path.events.push_back({t, static_cast<int>(k)});
        }
    }
    std::sort(path.events.begin(), path.events.end(),
              [](const JumpEvent& a, const JumpEvent& b) {
                  return a.time < b.time || (a.time == b.time && a.atom < b.atom);
              });
    return path;
}

} // namespace nfsde
