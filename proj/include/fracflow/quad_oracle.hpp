// Ground-truth integrator for the kernel entries: adaptive Gauss-Kronrod
// quadrature with singularity-aware substitutions. Slow path, used by tests
// and the self-check mode to cross-validate the closed forms.
#pragma once

#include <functional>

#include "fracflow/kernels.hpp"

namespace fracflow {

// Adaptive Gauss-Kronrod 7/15 on a finite interval, absolute tolerance.
// Error estimates at or below noise_floor count as converged (roundoff of the
// problem scale). Throws NumericalError with the achieved estimate if
// max_depth is exhausted.
double adaptive_gk(const std::function<double(double)>& f, double a, double b, double abs_tol,
                   int max_depth = 52, double noise_floor = 0.0);

// Same integral as hat_pair_entry, evaluated by numeric quadrature only:
// outer adaptive integration in the pair distance with a power substitution
// against the diagonal singularity and an inverted tail map, inner quadrature
// over hat cross sections split at the breakpoints and clip radii.
double oracle_hat_pair_entry(const Grid& grid, std::size_t i, std::size_t j,
                             const KernelExponent& kexp, const RangeClip& clip = RangeClip::none(),
                             double rel_tol = 1e-10);

// Numeric counterpart of hat_product_entry.
double oracle_hat_product_entry(const Grid& grid, std::size_t i, std::size_t j,
                                const KernelExponent& kexp, const RangeClip& clip,
                                double rel_tol = 1e-10);

// Numeric counterpart of pair_integral_pc via iterated adaptive quadrature
// over the two intervals.
double oracle_pair_integral_pc(double gap, double h, double q,
                               const RangeClip& clip = RangeClip::none(), double rel_tol = 1e-10);

}  // namespace fracflow
