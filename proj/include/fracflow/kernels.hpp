// Closed-form evaluation of the singular pair integrals behind every energy
// matrix: integrals of piecewise polynomials against |x-y|^q over interval
// pairs and hat-function pairs, with optional restriction of |x-y| to a band.
#pragma once

#include <cstddef>
#include <limits>

#include "fracflow/grid.hpp"

namespace fracflow {

// Kernel |z|^q with q = -(1+2s) in d = 1; s = 0 is the near-range limit
// kernel |z|^{-1}. The Dirichlet sentinel selects the local gradient form
// instead of an integral kernel.
struct KernelExponent {
    double s = 0.0;
    bool dirichlet = false;

    static KernelExponent fractional(double s_);
    static KernelExponent dirichlet_form() { return KernelExponent{0.0, true}; }

    double q() const { return -(1.0 + 2.0 * s); }
};

// Restriction r_lo < |x-y| < r_hi. Default: no restriction.
struct RangeClip {
    double r_lo = 0.0;
    double r_hi = std::numeric_limits<double>::infinity();

    static RangeClip none() { return {}; }
    static RangeClip near_range(double r = 1.0) { return {0.0, r}; }
    static RangeClip far_range(double r = 1.0) { return {r, std::numeric_limits<double>::infinity()}; }
    static RangeClip band(double lo, double hi);
};

// Second antiderivative of t^q, branch-selected at q = -1 and q = -2.
// Psi(0) = 0 for the q = -1 branch; t = 0 with q <= -2 diverges.
double antideriv2(double q, double t);

// Exact integral of t^p over [a, b], 0 <= a <= b <= +inf, with the log branch
// at p = -1 and a stabilized power difference near it. Throws NumericalError
// when the integral diverges (a = 0 with p <= -1, or b = inf with p >= -1).
double pow_integral(double p, double a, double b);

// Integral of |x-y|^q over I x I' where I, I' are intervals of length h whose
// nearest endpoints are `gap` apart, restricted by `clip`. Exact. Divergent
// configurations (touching intervals with q <= -2 and no lower clip) throw.
double pair_integral_pc(double gap, double h, double q, const RangeClip& clip = RangeClip::none());

// Bilinear energy entry for the hat pair (i, j), 0-based:
//   (1/2) * iint_{r_lo<|x-y|<r_hi} (phi_i(x)-phi_i(y)) (phi_j(x)-phi_j(y)) |x-y|^q dy dx
// over R^2 (zero extension included). Exact via the hat cross-correlation,
// which is a cubic B-spline. Depends on |i-j| only. With the Dirichlet
// sentinel returns the stiffness entry integral phi_i' phi_j'.
double hat_pair_entry(const Grid& grid, std::size_t i, std::size_t j, const KernelExponent& kexp,
                      const RangeClip& clip = RangeClip::none());

// Product-form pair integral for the hat pair (i, j):
//   iint_{clip} phi_i(x) phi_j(y) |x-y|^q dy dx   (>= 0)
// The far-field matrices are the negatives of these with clip = far_range(1).
double hat_product_entry(const Grid& grid, std::size_t i, std::size_t j, const KernelExponent& kexp,
                         const RangeClip& clip);

// Hat cross-correlation: integral of phi_0(x) phi_m(x + t) dx on a unit-spacing
// grid equals b3(t - m); the energy entries above integrate this against the
// kernel. Exposed for tests.
double cubic_bspline(double x);

}  // namespace fracflow
