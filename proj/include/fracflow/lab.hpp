// Experiment harness: parameter sweeps for the s -> 0 and s -> 1 limits of
// the energies, flow-stability studies, and time-step rate fits.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fracflow/flows.hpp"

namespace fracflow {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // rms residual of the log-log fit
};

// Least squares on log-log; requires >= 3 points with positive coordinates.
FitResult fit_order(const std::vector<std::pair<double, double>>& points);

// Tabular sweep output plus named summary scalars and pass/fail checks,
// insertion-ordered so exports are deterministic.
struct SweepResult {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, double>> stats;
    std::vector<std::pair<std::string, bool>> checks;

    void stat(const std::string& key, double v) { stats.emplace_back(key, v); }
    void check(const std::string& key, bool ok) { checks.emplace_back(key, ok); }
    double stat_value(const std::string& key) const;
    bool check_value(const std::string& key) const;
    bool all_ok() const;
};

// Bounded worker pool width for sweep points (1 = serial). Sweep assembly is
// deterministic regardless: results are ordered by parameter index.
void set_worker_count(unsigned n);
unsigned worker_count();

// s F^s(u) along s_list (decreasing toward 0) with a linear-in-s Richardson
// limit compared against F^0(u).
SweepResult gamma_sweep_order0(const GridFunction& u, const std::vector<double>& s_list);

// Renormalized energies along s -> 0: rows {s, Fhat, G, J} with componentwise
// limits compared against the s = 0 forms.
SweepResult gamma_sweep_order1(const GridFunction& u, const std::vector<double>& s_list);

// (1-s) F^s along s -> 1 with the grid refined jointly, n(s) = ceil(n0/(1-s))
// capped; diagonal extrapolation compared against the Dirichlet target.
SweepResult gamma_sweep_bbm(const ScalarField& u0, const Domain& domain, std::size_t n0,
                            const std::vector<double>& s_list, std::size_t n_cap = 2048);

struct MsConstantResult {
    double c_hat = 0.0;
    bool matches_d_omega_d = false;       // full double integral reading
    bool matches_half_d_omega_d = false;  // half convention reading
    SweepResult sweep;
};

// Empirical limit of s * (full double integral of u~) / ||u||^2 as s -> 0;
// distinguishes d w_d from d w_d / 2 at 3%.
MsConstantResult ms_constant_estimate(const GridFunction& u, const std::vector<double>& s_list);

struct StabilityConfig {
    FlowFamily family = FlowFamily::ZeroOrder;
    FlowFamily limit_family = FlowFamily::LimitODE;
    std::vector<double> s_list;
    double tau = 1e-3;
    double T = 1.0;
    Domain domain;
    std::size_t n = 0;      // fixed grid size, or
    std::size_t n0 = 0;     // joint refinement n(s) = ceil(n0/(1-s)) when set
    std::size_t n_cap = 2048;
    ScalarField u0;         // fixed smooth datum across s (well-prepared)
    MassMode mass = MassMode::Lumped;
};

// Per s: sup_t ||x^s(t) - x^limit(t)||_M over 64 sample times plus the energy
// gap |E_s(x^s(T/2)) - E_lim(x^lim(T/2))|; both must trend down along s_list.
SweepResult flow_stability(const StabilityConfig& config);

struct RateConfig {
    FlowFamily family = FlowFamily::LimitODE;
    double s = 0.0;
    Domain domain;
    std::size_t n = 64;
    double T = 1.0;
    ScalarField u0;
    MassMode mass = MassMode::Lumped;
    std::vector<double> tau_list;
};

// Fitted order of sup_t error versus tau, against the exact reference when
// one exists and a 16x-finer run otherwise. Pass iff order >= 0.45.
SweepResult tau_rate(const RateConfig& config);

}  // namespace fracflow
