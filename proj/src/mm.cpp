#include "fracflow/mm.hpp"

#include <algorithm>
#include <cmath>

#include "fracflow/util.hpp"

namespace fracflow {

Trajectory::Trajectory(std::string label, GridPtr grid, double tau, double horizon)
    : label_(std::move(label)), grid_(std::move(grid)), tau_(tau), horizon_(horizon) {}

void Trajectory::push(Vec state, double energy, double increment) {
    steps_.push_back(std::move(state));
    energies_.push_back(energy);
    if (steps_.size() > 1) increments_.push_back(increment);
}

GridFunction Trajectory::interpolate(double t) const {
    if (!(t >= 0.0 && t <= horizon_ + 1e-12 * (1.0 + horizon_)))
        throw ConfigError("interpolate: time outside [0, T]");
    if (steps_.size() == 1) return GridFunction(grid_, steps_[0]);
    const std::size_t last = steps_.size() - 1;
    double pos = t / tau_;
    // Step times hit the stored states exactly, also when t = k*tau was
    // formed in floating point.
    const double snapped = std::round(pos);
    if (std::abs(pos - snapped) <= 1e-9 * (1.0 + std::abs(pos))) pos = snapped;
    pos = std::min(pos, static_cast<double>(last));
    auto k = static_cast<std::size_t>(std::min(std::floor(pos), static_cast<double>(last - 1)));
    const double theta = pos - static_cast<double>(k);
    Vec out = steps_[k];
    if (theta > 0.0 && k + 1 <= last) {
        const Vec& next = steps_[k + 1];
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] += theta * (next[i] - out[i]);
    }
    return GridFunction(grid_, std::move(out));
}

Trajectory run_mm(const QuadraticEnergy& E, double tau, double T, const GridFunction& u0,
                  const MmOptions& opts) {
    E.check_same_grid(u0);
    if (!(tau > 0.0) || !(T > 0.0)) throw ConfigError("run_mm: tau and T must be positive");
    if (E.lambda() > 0.0) {
        const double window = opts.strict_rate_window ? 1.0 / (16.0 * E.lambda()) : E.tau_limit();
        if (tau >= window)
            throw ConfigError("run_mm: tau = " + format17(tau) + " outside the admissibility window tau < " +
                              format17(window) + (opts.strict_rate_window ? " (= 1/(16 lambda))" : " (= 1/(2 lambda))"));
    }

    const auto K = static_cast<std::size_t>(std::ceil(T / tau - 1e-12));
    Trajectory traj(E.label(), u0.grid_ptr(), tau, static_cast<double>(K) * tau);

    // System matrix (M + 2 tau c A) is fixed along the run.
    SymMatrix S(E.mass().mat);
    S.add_scaled(E.form().mat, 2.0 * tau * E.scale());

    Vec x = u0.coeffs();
    double energy = E.value(u0);
    traj.push(x, energy, 0.0);

    for (std::size_t k = 0; k < K; ++k) {
        const Vec rhs = E.mass().mat.matvec(x);
        Vec next = cg_solve(S, rhs, 1e-12, 0, &x).x;

        const Vec diff = vsub(next, x);
        const double incr_norm2 = E.mass().mat.quad(diff);
        const double energy_next = E.scale() * E.form().mat.quad(next);
        const double lhs = energy_next + incr_norm2 / (2.0 * tau);
        const double tol = 1e-10 * (1.0 + std::abs(energy));
        if (lhs > energy + tol) {
            throw NumericalError("run_mm[" + E.label() + "]: dissipation inequality violated at step " +
                                 std::to_string(k) + ": value(x_{k+1}) + |dx|^2/(2 tau) = " + format17(lhs) +
                                 " > value(x_k) = " + format17(energy));
        }
        x = std::move(next);
        energy = energy_next;
        traj.push(x, energy, incr_norm2 / tau);
    }
    return traj;
}

DissipationReport dissipation_report(const Trajectory& traj, const QuadraticEnergy& E) {
    if (traj.step_count() == 0) throw ConfigError("dissipation_report: empty trajectory");
    DissipationReport rep;
    for (double v : traj.increments()) rep.total_increment += v;
    rep.energy_drop = traj.energies().front() - traj.energies().back();

    const Vec& last = traj.state(traj.step_count() - 1);
    const double bound = 2.0 * (traj.energies().front() + 0.5 * E.lambda() * E.mass().mat.quad(last));
    const double scale = std::abs(bound) + std::abs(rep.total_increment) + 1.0;
    rep.bound_ok = rep.total_increment <= bound + 1e-8 * scale;
    return rep;
}

std::vector<double> mm_error_vs_reference(const QuadraticEnergy& E, const std::vector<double>& tau_list,
                                          double T, const GridFunction& u0,
                                          const ReferenceSolution& reference, const MmOptions& opts) {
    if (tau_list.empty()) throw ConfigError("mm_error_vs_reference: empty tau list");
    const double tau_coarse = *std::max_element(tau_list.begin(), tau_list.end());

    std::vector<double> samples;
    for (int k = 0; k <= 64; ++k) samples.push_back(T * static_cast<double>(k) / 64.0);
    for (double t = tau_coarse; t < T; t += tau_coarse) samples.push_back(t);
    std::sort(samples.begin(), samples.end());
    samples.erase(std::unique(samples.begin(), samples.end()), samples.end());

    std::vector<double> sup_errors;
    sup_errors.reserve(tau_list.size());
    for (double tau : tau_list) {
        const Trajectory traj = run_mm(E, tau, T, u0, opts);
        double sup = 0.0;
        for (double t : samples) {
            if (t > traj.horizon()) continue;
            const GridFunction xt = traj.interpolate(t);
            const Vec err = vsub(xt.coeffs(), reference(t));
            sup = std::max(sup, E.norm(err));
        }
        sup_errors.push_back(sup);
    }
    return sup_errors;
}

}  // namespace fracflow
