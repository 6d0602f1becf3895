// Binds the assembled energies to the six evolutions under study and
// provides exact or spectral references for the limit flows.
#pragma once

#include <optional>
#include <string>

#include "fracflow/mm.hpp"

namespace fracflow {

enum class FlowFamily {
    ZeroOrder,     // s F^s               -> LimitODE as s -> 0
    Renormalized,  // F^s - F^0/s         -> LimitZero as s -> 0
    BBM,           // (1-s) F^s           -> LimitHeat as s -> 1
    LimitODE,      // F^0 = (d w_d / 2) ||u||^2
    LimitZero,     // G^0_1 + J^0_1
    LimitHeat,     // (w_d / 4) |u'|^2
};

std::string flow_family_name(FlowFamily family);
FlowFamily flow_family_from_name(const std::string& name);
bool flow_family_needs_s(FlowFamily family);

struct FlowSpec {
    explicit FlowSpec(GridFunction u0_) : u0(std::move(u0_)) {
        domain = u0.grid().domain();
        n = u0.grid().n();
    }

    FlowFamily family = FlowFamily::LimitODE;
    double s = 0.0;  // required for the three s-families
    Domain domain;
    std::size_t n = 64;
    double tau = 1e-3;
    double T = 1.0;
    GridFunction u0;
    MassMode mass = MassMode::Lumped;
};

// Assembles the energy of the family on the grid, with scaling and analytic
// lambda modulus fixed by the family (2|Omega| for the renormalized pair,
// zero for the convex families).
QuadraticEnergy build_energy(FlowFamily family, double s, GridPtr grid, MassMode mass);
QuadraticEnergy build_energy(const FlowSpec& spec);

Trajectory solve(const FlowSpec& spec, const MmOptions& opts = {});

// Exact reference states where available:
//   LimitODE  -> u0 exp(-d w_d t), closed form;
//   LimitHeat -> expansion in the discrete sine eigenbasis of the pencil
//                (stiffness, mass) with exact per-mode decay (no time error);
//   others    -> nullopt (fine-tau minimizing-movement references instead).
std::optional<GridFunction> exact_reference(const FlowSpec& spec, double t);

// Callable reference for the whole time axis, or nullopt if unavailable.
std::optional<ReferenceSolution> exact_reference_solution(const FlowSpec& spec);

}  // namespace fracflow
