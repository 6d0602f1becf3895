#include "fracflow/flows.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "fracflow/util.hpp"

namespace fracflow {

std::string flow_family_name(FlowFamily family) {
    switch (family) {
        case FlowFamily::ZeroOrder: return "zero_order";
        case FlowFamily::Renormalized: return "renormalized";
        case FlowFamily::BBM: return "bbm";
        case FlowFamily::LimitODE: return "limit_ode";
        case FlowFamily::LimitZero: return "limit_zero";
        case FlowFamily::LimitHeat: return "limit_heat";
    }
    return "?";
}

FlowFamily flow_family_from_name(const std::string& name) {
    for (FlowFamily f : {FlowFamily::ZeroOrder, FlowFamily::Renormalized, FlowFamily::BBM,
                         FlowFamily::LimitODE, FlowFamily::LimitZero, FlowFamily::LimitHeat}) {
        if (flow_family_name(f) == name) return f;
    }
    throw ConfigError("unknown flow family: '" + name + "'");
}

bool flow_family_needs_s(FlowFamily family) {
    return family == FlowFamily::ZeroOrder || family == FlowFamily::Renormalized ||
           family == FlowFamily::BBM;
}

QuadraticEnergy build_energy(FlowFamily family, double s, GridPtr grid, MassMode mass) {
    if (flow_family_needs_s(family) && !(s > 0.0 && s < 1.0))
        throw ConfigError(flow_family_name(family) + ": s must lie in (0, 1)");
    EnergyMatrix M = assemble_mass(grid, mass);
    const double lambda_ren = 2.0 * grid->domain().length();
    switch (family) {
        case FlowFamily::ZeroOrder:
            return QuadraticEnergy("zero_order(s=" + format17(s) + ")", assemble_gagliardo(grid, s),
                                   std::move(M), s, 0.0);
        case FlowFamily::Renormalized:
            return QuadraticEnergy("renormalized(s=" + format17(s) + ")",
                                   assemble_renormalized(grid, s), std::move(M), 1.0, lambda_ren);
        case FlowFamily::BBM:
            return QuadraticEnergy("bbm(s=" + format17(s) + ")", assemble_gagliardo(grid, s),
                                   std::move(M), 1.0 - s, 0.0);
        case FlowFamily::LimitODE: {
            // The form reuses the metric mass matrix, which makes the prox
            // diagonal and the gradient exactly d w_d u in either mode.
            EnergyMatrix A = assemble_mass(grid, mass);
            return QuadraticEnergy("limit_ode", std::move(A), std::move(M), kDOmegaD / 2.0, 0.0);
        }
        case FlowFamily::LimitZero:
            return QuadraticEnergy("limit_zero", assemble_hat0(grid), std::move(M), 1.0, lambda_ren);
        case FlowFamily::LimitHeat:
            return QuadraticEnergy("limit_heat", assemble_dirichlet(grid), std::move(M),
                                   kOmegaD / 4.0, 0.0);
    }
    throw ConfigError("unknown flow family");
}

QuadraticEnergy build_energy(const FlowSpec& spec) {
    return build_energy(spec.family, spec.s, spec.u0.grid_ptr(), spec.mass);
}

Trajectory solve(const FlowSpec& spec, const MmOptions& opts) {
    const QuadraticEnergy E = build_energy(spec);
    return run_mm(E, spec.tau, spec.T, spec.u0, opts);
}

namespace {

constexpr double kPi = 3.14159265358979323846;

// Discrete sine modes diagonalize both the stiffness and the two mass
// matrices on a uniform grid, which makes the heat reference exact for the
// spatially-discrete system.
struct SineSpectrum {
    std::vector<std::vector<double>> modes;  // modes[j][i] = sin((i+1)(j+1) pi / (n+1))
    std::vector<double> rates;               // decay rate of mode j under the heat energy
    std::vector<double> coeffs;              // expansion of u0
};

SineSpectrum heat_spectrum(const FlowSpec& spec) {
    const Grid& g = spec.u0.grid();
    const std::size_t n = g.n();
    const double h = g.h();
    const double np1 = static_cast<double>(n + 1);

    SineSpectrum sp;
    sp.modes.resize(n);
    sp.rates.resize(n);
    sp.coeffs.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        auto& mode = sp.modes[j];
        mode.resize(n);
        const double theta = static_cast<double>(j + 1) * kPi / np1;
        for (std::size_t i = 0; i < n; ++i)
            mode[i] = std::sin(static_cast<double>(i + 1) * theta);
        const double stiff = (2.0 / h) * (1.0 - std::cos(theta));
        const double mass = spec.mass == MassMode::Lumped ? h : (h / 6.0) * (4.0 + 2.0 * std::cos(theta));
        // M du/dt = -2 c K u with c = w_d/4.
        sp.rates[j] = 2.0 * (kOmegaD / 4.0) * stiff / mass;
        // Sine modes are orthogonal with sum_i sin^2 = (n+1)/2; both masses
        // act diagonally on them.
        double proj = 0.0;
        for (std::size_t i = 0; i < n; ++i) proj += spec.u0.coeffs()[i] * mode[i];
        sp.coeffs[j] = proj / (0.5 * np1);
    }
    return sp;
}

}  // namespace

std::optional<GridFunction> exact_reference(const FlowSpec& spec, double t) {
    auto sol = exact_reference_solution(spec);
    if (!sol) return std::nullopt;
    return GridFunction(spec.u0.grid_ptr(), (*sol)(t));
}

std::optional<ReferenceSolution> exact_reference_solution(const FlowSpec& spec) {
    if (spec.family == FlowFamily::LimitODE) {
        const Vec u0 = spec.u0.coeffs();
        return ReferenceSolution([u0](double t) {
            Vec out = u0;
            const double decay = std::exp(-kDOmegaD * t);
            for (double& v : out) v *= decay;
            return out;
        });
    }
    if (spec.family == FlowFamily::LimitHeat) {
        auto sp = std::make_shared<SineSpectrum>(heat_spectrum(spec));
        const std::size_t n = spec.u0.size();
        return ReferenceSolution([sp, n](double t) {
            Vec out(n, 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                const double amp = sp->coeffs[j] * std::exp(-sp->rates[j] * t);
                if (amp == 0.0) continue;
                const auto& mode = sp->modes[j];
                for (std::size_t i = 0; i < n; ++i) out[i] += amp * mode[i];
            }
            return out;
        });
    }
    return std::nullopt;
}

}  // namespace fracflow
