// Uniform energy abstraction over the assembled quadratic forms in the L^2
// metric realized by the mass matrix: value, Riesz gradient, proximal map,
// and a numeric certificate for the lambda-convexity modulus.
#pragma once

#include <memory>
#include <string>

#include "fracflow/assembly.hpp"
#include "fracflow/grid.hpp"

namespace fracflow {

class QuadraticEnergy {
public:
    // value(u) = c * u^T A u; lambda is the analytic convexity modulus
    // (value + (lambda/2)||.||_M^2 is convex).
    QuadraticEnergy(std::string label, EnergyMatrix A, EnergyMatrix M, double scale_c,
                    double lambda);

    const std::string& label() const { return label_; }
    const EnergyMatrix& form() const { return A_; }
    const EnergyMatrix& mass() const { return M_; }
    double scale() const { return c_; }
    double lambda() const { return lambda_; }
    const Grid& grid() const { return *A_.grid; }
    GridPtr grid_ptr() const { return A_.grid; }

    double value(const GridFunction& u) const;

    // M-inner product and norm (the Hilbert metric of the flow).
    double inner(const Vec& a, const Vec& b) const;
    double norm(const Vec& a) const;
    double norm(const GridFunction& a) const { return norm(a.coeffs()); }

    // L^2-Riesz gradient: solves M g = 2 c A u.
    GridFunction gradient(const GridFunction& u) const;

    // Unique minimizer of value(x) + (1/2 tau) ||x - y||_M^2. Requires
    // tau < 1/(2 lambda) when lambda > 0.
    GridFunction prox(double tau, const GridFunction& y) const;

    // Largest admissible step 1/(2 lambda), infinite for convex energies.
    double tau_limit() const;

    void check_same_grid(const GridFunction& u) const;

private:
    std::string label_;
    EnergyMatrix A_;
    EnergyMatrix M_;
    double c_;
    double lambda_;
};

// Smallest lambda-hat such that value + (lambda-hat/2)||.||_M^2 is convex,
// via inverse power iteration on the shifted pencil. The analytic modulus is
// passed in by the energy; this is the numeric verification path.
double estimate_lambda(const QuadraticEnergy& E);

}  // namespace fracflow
