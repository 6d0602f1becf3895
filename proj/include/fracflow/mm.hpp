// Minimizing-movement (implicit Euler) engine: discrete-in-time evolutions,
// piecewise-affine interpolation, and dissipation bookkeeping.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fracflow/energy.hpp"

namespace fracflow {

class Trajectory {
public:
    Trajectory(std::string label, GridPtr grid, double tau, double horizon);

    const std::string& label() const { return label_; }
    double tau() const { return tau_; }
    double horizon() const { return horizon_; }
    std::size_t step_count() const { return steps_.size(); }  // states x_0 .. x_K
    const Vec& state(std::size_t k) const { return steps_[k]; }
    const std::vector<double>& energies() const { return energies_; }
    const std::vector<double>& increments() const { return increments_; }
    GridPtr grid() const { return grid_; }

    // Piecewise-affine interpolant x^tau(t); t must lie in [0, horizon].
    GridFunction interpolate(double t) const;

    void push(Vec state, double energy, double increment);

private:
    std::string label_;
    GridPtr grid_;
    double tau_;
    double horizon_;
    std::vector<Vec> steps_;
    std::vector<double> energies_;
    std::vector<double> increments_;  // (1/tau)||x_{k+1}-x_k||_M^2, one per transition
};

struct MmOptions {
    // Enforce the stricter tau < 1/(16 lambda) window required by the
    // quantitative error bound (set by rate studies).
    bool strict_rate_window = false;
};

// Runs ceil(T/tau) prox steps from u0, asserting the per-step dissipation
// inequality value(x_{k+1}) + (1/2tau)||x_{k+1}-x_k||^2 <= value(x_k) at
// tolerance 1e-10 (1 + |value(x_k)|) and aborting with diagnostics otherwise.
Trajectory run_mm(const QuadraticEnergy& E, double tau, double T, const GridFunction& u0,
                  const MmOptions& opts = {});

struct DissipationReport {
    double total_increment = 0.0;  // sum (1/tau)||x_{k+1}-x_k||_M^2
    double energy_drop = 0.0;      // value(x_0) - value(x_K)
    bool bound_ok = false;         // total <= 2(value(x_0) + (lambda/2)||x_K||^2) + slack
};

DissipationReport dissipation_report(const Trajectory& traj, const QuadraticEnergy& E);

// Time-indexed reference states for convergence studies.
using ReferenceSolution = std::function<Vec(double)>;

// sup_t ||x^tau(t) - reference(t)||_M per tau, sampled on 64 uniform times
// plus the step times of the coarsest tau.
std::vector<double> mm_error_vs_reference(const QuadraticEnergy& E, const std::vector<double>& tau_list,
                                          double T, const GridFunction& u0,
                                          const ReferenceSolution& reference,
                                          const MmOptions& opts = {});

}  // namespace fracflow
