// Assembles the symmetric quadratic-form matrices of the implemented
// energies on a grid. All kernels are translation invariant and the hats are
// translates of one another, so every matrix is Toeplitz: one closed-form
// integral per index offset, then an O(n^2) fill.
#pragma once

#include <string>

#include "fracflow/grid.hpp"
#include "fracflow/kernels.hpp"
#include "fracflow/linalg.hpp"

namespace fracflow {

enum class MatrixKind {
    Gagliardo,      // F^s: full-range difference form, s in (0,1)
    Near,           // G^s_1: difference form on |x-y| < 1, s in [0,1)
    Far,            // J^s_1: negative product form on |x-y| > 1, s in [0,1)
    Renormalized,   // F^s - (d omega_d / 2s) * mass
    Hat0,           // Near(0) + Far(0)
    MassLumped,     // diagonal h
    MassConsistent, // tridiagonal (h/6)[1 4 1]
    Dirichlet,      // stiffness (1/h)[-1 2 -1]
};

std::string matrix_kind_name(MatrixKind kind);

struct EnergyMatrix {
    MatrixKind kind;
    double s = 0.0;  // kernel order where applicable
    GridPtr grid;
    SymMatrix mat;

    std::size_t n() const { return mat.size(); }
    void write_csv(const std::string& path) const;
};

EnergyMatrix assemble_gagliardo(GridPtr grid, double s);
EnergyMatrix assemble_near(GridPtr grid, double s);
EnergyMatrix assemble_far(GridPtr grid, double s);
EnergyMatrix assemble_renormalized(GridPtr grid, double s);
EnergyMatrix assemble_hat0(GridPtr grid);

enum class MassMode { Lumped, Consistent };

EnergyMatrix assemble_mass(GridPtr grid, MassMode mode);
EnergyMatrix assemble_dirichlet(GridPtr grid);

}  // namespace fracflow
