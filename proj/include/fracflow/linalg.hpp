// Dense symmetric matrices and the preconditioned CG solver used by the
// prox steps. Desk-scale problems (n <= 2048), so everything is dense.
#pragma once

#include <cstddef>
#include <vector>

namespace fracflow {

using Vec = std::vector<double>;

// Dense symmetric matrix, full row-major storage.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    // Sets both (i,j) and (j,i); keeps symmetry exact by storage.
    void set_sym(std::size_t i, std::size_t j, double v) {
        a_[i * n_ + j] = v;
        a_[j * n_ + i] = v;
    }

    void matvec(const Vec& x, Vec& y) const;
    Vec matvec(const Vec& x) const;

    double quad(const Vec& u) const;  // u^T A u
    double trace() const;
    double max_abs() const;

    SymMatrix& add_scaled(const SymMatrix& other, double alpha);  // *this += alpha*other
    SymMatrix& scale(double alpha);

    const std::vector<double>& data() const { return a_; }

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
void axpy(double alpha, const Vec& x, Vec& y);  // y += alpha*x
Vec scaled(const Vec& x, double alpha);
Vec vsub(const Vec& a, const Vec& b);
double max_abs(const Vec& a);

struct CgResult {
    Vec x;
    std::size_t iterations = 0;
    double rel_residual = 0.0;
};

// Jacobi-preconditioned conjugate gradient for SPD systems.
// Throws NumericalError on breakdown or if the relative residual target is
// not met within max_iter (default 10n) iterations.
CgResult cg_solve(const SymMatrix& A, const Vec& b, double rel_tol = 1e-12,
                  std::size_t max_iter = 0, const Vec* x0 = nullptr);

// Smallest generalized eigenvalue of (A, M) with M SPD diagonal-dominant mass.
// Inverse power iteration on the shifted pencil (A + shift*M, M); `shift` must
// make A + shift*M positive definite.
double min_generalized_eigenvalue(const SymMatrix& A, const SymMatrix& M, double shift,
                                  double tol = 1e-11, std::size_t max_iter = 500);

// Largest eigenvalue of a symmetric matrix by power iteration (used for PSD
// checks via spectral shifts).
double max_eigenvalue_sym(const SymMatrix& A, double tol = 1e-11, std::size_t max_iter = 2000);

// Smallest eigenvalue of a symmetric matrix via shift by a Gershgorin bound.
double min_eigenvalue_sym(const SymMatrix& A, double tol = 1e-11);

}  // namespace fracflow
