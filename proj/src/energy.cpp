#include "fracflow/energy.hpp"

#include <cmath>
#include <utility>

#include "fracflow/util.hpp"

namespace fracflow {

QuadraticEnergy::QuadraticEnergy(std::string label, EnergyMatrix A, EnergyMatrix M, double scale_c,
                                 double lambda)
    : label_(std::move(label)), A_(std::move(A)), M_(std::move(M)), c_(scale_c), lambda_(lambda) {
    if (!(c_ > 0.0)) throw ConfigError("energy: scale must be positive");
    if (lambda_ < 0.0) throw ConfigError("energy: lambda modulus must be >= 0");
    if (!A_.grid->same_as(*M_.grid)) throw ConfigError("energy: form and mass grids differ");
}

void QuadraticEnergy::check_same_grid(const GridFunction& u) const {
    if (!u.grid().same_as(*A_.grid)) throw ConfigError("energy: grid mismatch");
}

double QuadraticEnergy::value(const GridFunction& u) const {
    check_same_grid(u);
    return c_ * A_.mat.quad(u.coeffs());
}

double QuadraticEnergy::inner(const Vec& a, const Vec& b) const {
    return dot(a, M_.mat.matvec(b));
}

double QuadraticEnergy::norm(const Vec& a) const { return std::sqrt(M_.mat.quad(a)); }

GridFunction QuadraticEnergy::gradient(const GridFunction& u) const {
    check_same_grid(u);
    Vec rhs = A_.mat.matvec(u.coeffs());
    for (double& v : rhs) v *= 2.0 * c_;
    if (M_.kind == MatrixKind::MassLumped) {
        const double h = A_.grid->h();
        for (double& v : rhs) v /= h;
        return GridFunction(u.grid_ptr(), std::move(rhs));
    }
    return GridFunction(u.grid_ptr(), cg_solve(M_.mat, rhs, 1e-13).x);
}

double QuadraticEnergy::tau_limit() const {
    return lambda_ > 0.0 ? 1.0 / (2.0 * lambda_) : std::numeric_limits<double>::infinity();
}

GridFunction QuadraticEnergy::prox(double tau, const GridFunction& y) const {
    check_same_grid(y);
    if (!(tau > 0.0)) throw ConfigError("prox: tau must be positive");
    if (tau >= tau_limit())
        throw ConfigError("prox: tau = " + format17(tau) + " outside the admissibility window tau < 1/(2 lambda) = " +
                          format17(tau_limit()));
    SymMatrix S(M_.mat);
    S.add_scaled(A_.mat, 2.0 * tau * c_);
    const Vec rhs = M_.mat.matvec(y.coeffs());
    return GridFunction(y.grid_ptr(), cg_solve(S, rhs, 1e-12, 0, &y.coeffs()).x);
}

double estimate_lambda(const QuadraticEnergy& E) {
    // Shift chosen from the analytic modulus so the pencil matrix is SPD.
    const double shift = (E.lambda() + 1.0) / (2.0 * E.scale()) + 1.0;
    const double mu_min = min_generalized_eigenvalue(E.form().mat, E.mass().mat, shift);
    return -2.0 * E.scale() * mu_min;
}

}  // namespace fracflow
