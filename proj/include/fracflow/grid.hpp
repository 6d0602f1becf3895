// 1-D bounded domain, uniform interior grid, and nodal functions in the
// piecewise-linear hat basis, extended by zero outside the domain.
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fracflow/linalg.hpp"

namespace fracflow {

// Measure of the unit ball in R^1 and d*omega_d, the two geometric constants
// entering the limit energies.
inline constexpr double kOmegaD = 2.0;
inline constexpr double kDOmegaD = 2.0;

struct Domain {
    double a = -1.0;
    double b = 1.0;

    double length() const { return b - a; }
    double center() const { return 0.5 * (a + b); }
};

class Grid {
public:
    // n interior nodes x_i = a + i*h, h = (b-a)/(n+1). Requires n >= 3, a < b.
    Grid(Domain domain, std::size_t n);

    const Domain& domain() const { return domain_; }
    std::size_t n() const { return n_; }
    double h() const { return h_; }
    double node(std::size_t i) const { return nodes_[i]; }  // i in [0, n)
    const std::vector<double>& nodes() const { return nodes_; }

    // Value of the hat function centered at node i (0-based) at x; hats peak
    // at 1 and vanish outside (x_i - h, x_i + h).
    double hat(std::size_t i, double x) const;

    bool same_as(const Grid& other) const {
        return domain_.a == other.domain_.a && domain_.b == other.domain_.b && n_ == other.n_;
    }

    std::string fingerprint() const;

private:
    Domain domain_;
    std::size_t n_;
    double h_;
    std::vector<double> nodes_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(Domain domain, std::size_t n);

// Nodal coefficients of u_tilde = sum u_i phi_i; identically zero outside the
// domain by construction.
class GridFunction {
public:
    GridFunction(GridPtr grid, Vec coeffs);
    explicit GridFunction(GridPtr grid);  // zero function

    const Grid& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }
    const Vec& coeffs() const { return coeffs_; }
    Vec& coeffs() { return coeffs_; }
    std::size_t size() const { return coeffs_.size(); }

    // Pointwise evaluation of the represented (zero-extended) function.
    double eval(double x) const;

    void write_csv(const std::string& path) const;
    static GridFunction read_csv(GridPtr grid, const std::string& path);

private:
    GridPtr grid_;
    Vec coeffs_;
};

using ScalarField = std::function<double(double)>;

GridFunction sample(const ScalarField& f, GridPtr grid);

// Smooth test-function families. bump and plateau are C^inf with support
// strictly inside the domain (margin = fraction of |Omega| left free near
// each endpoint); sine_mode vanishes at the endpoints.
ScalarField bump_field(const Domain& domain, double center, double width);
ScalarField bump_field(const Domain& domain, double margin = 0.1);
ScalarField sine_mode_field(const Domain& domain, unsigned k);
ScalarField plateau_field(const Domain& domain, double margin = 0.1);

// Named lookup used by the CLI config: {"bump","sine_mode","plateau"}.
ScalarField builtin_family(const std::string& name, const Domain& domain,
                           const std::vector<double>& params);

}  // namespace fracflow
