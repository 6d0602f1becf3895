#include "fracflow/assembly.hpp"

#include <fstream>
#include <vector>

#include "fracflow/util.hpp"

namespace fracflow {

std::string matrix_kind_name(MatrixKind kind) {
    switch (kind) {
        case MatrixKind::Gagliardo: return "gagliardo";
        case MatrixKind::Near: return "near";
        case MatrixKind::Far: return "far";
        case MatrixKind::Renormalized: return "renormalized";
        case MatrixKind::Hat0: return "hat0";
        case MatrixKind::MassLumped: return "mass_lumped";
        case MatrixKind::MassConsistent: return "mass_consistent";
        case MatrixKind::Dirichlet: return "dirichlet";
    }
    return "?";
}

void EnergyMatrix::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    const std::size_t n = mat.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j) out << ",";
            out << format17(mat.at(i, j));
        }
        out << "\n";
    }
}

namespace {

// Fills a Toeplitz matrix from per-offset values.
SymMatrix toeplitz_fill(std::size_t n, const std::vector<double>& by_offset) {
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m.set_sym(i, j, by_offset[j - i]);
    return m;
}

EnergyMatrix assemble_difference_form(GridPtr grid, double s, const RangeClip& clip,
                                      MatrixKind kind) {
    const std::size_t n = grid->n();
    const KernelExponent kexp = KernelExponent::fractional(s);
    std::vector<double> vals(n);
    for (std::size_t m = 0; m < n; ++m)
        vals[m] = hat_pair_entry(*grid, 0, m, kexp, clip);
    return EnergyMatrix{kind, s, grid, toeplitz_fill(n, vals)};
}

}  // namespace

EnergyMatrix assemble_gagliardo(GridPtr grid, double s) {
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("gagliardo: s must lie strictly in (0, 1)");
    return assemble_difference_form(std::move(grid), s, RangeClip::none(), MatrixKind::Gagliardo);
}

EnergyMatrix assemble_near(GridPtr grid, double s) {
    if (!(s >= 0.0 && s < 1.0)) throw ConfigError("near: s must lie in [0, 1)");
    return assemble_difference_form(std::move(grid), s, RangeClip::near_range(1.0), MatrixKind::Near);
}

EnergyMatrix assemble_far(GridPtr grid, double s) {
    if (!(s >= 0.0 && s < 1.0)) throw ConfigError("far: s must lie in [0, 1)");
    const std::size_t n = grid->n();
    const KernelExponent kexp = KernelExponent::fractional(s);
    std::vector<double> vals(n);
    for (std::size_t m = 0; m < n; ++m)
        vals[m] = -hat_product_entry(*grid, 0, m, kexp, RangeClip::far_range(1.0));
    return EnergyMatrix{MatrixKind::Far, s, grid, toeplitz_fill(n, vals)};
}

EnergyMatrix assemble_mass(GridPtr grid, MassMode mode) {
    const std::size_t n = grid->n();
    const double h = grid->h();
    SymMatrix m(n);
    if (mode == MassMode::Lumped) {
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = h;
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            m.at(i, i) = 4.0 * h / 6.0;
            if (i + 1 < n) m.set_sym(i, i + 1, h / 6.0);
        }
    }
    return EnergyMatrix{mode == MassMode::Lumped ? MatrixKind::MassLumped : MatrixKind::MassConsistent,
                        0.0, std::move(grid), std::move(m)};
}

EnergyMatrix assemble_dirichlet(GridPtr grid) {
    const std::size_t n = grid->n();
    const double h = grid->h();
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.at(i, i) = 2.0 / h;
        if (i + 1 < n) m.set_sym(i, i + 1, -1.0 / h);
    }
    return EnergyMatrix{MatrixKind::Dirichlet, 0.0, std::move(grid), std::move(m)};
}

EnergyMatrix assemble_renormalized(GridPtr grid, double s) {
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("renormalized: s must lie strictly in (0, 1)");
    EnergyMatrix gag = assemble_gagliardo(grid, s);
    const EnergyMatrix mass = assemble_mass(grid, MassMode::Consistent);
    gag.mat.add_scaled(mass.mat, -kDOmegaD / (2.0 * s));
    return EnergyMatrix{MatrixKind::Renormalized, s, std::move(grid), std::move(gag.mat)};
}

EnergyMatrix assemble_hat0(GridPtr grid) {
    EnergyMatrix near = assemble_near(grid, 0.0);
    const EnergyMatrix far = assemble_far(grid, 0.0);
    near.mat.add_scaled(far.mat, 1.0);
    return EnergyMatrix{MatrixKind::Hat0, 0.0, std::move(grid), std::move(near.mat)};
}

}  // namespace fracflow
