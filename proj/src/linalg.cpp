#include "fracflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fracflow/util.hpp"

namespace fracflow {

void SymMatrix::matvec(const Vec& x, Vec& y) const {
    y.assign(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        const double* row = a_.data() + i * n_;
        double acc = 0.0;
        for (std::size_t j = 0; j < n_; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

Vec SymMatrix::matvec(const Vec& x) const {
    Vec y;
    matvec(x, y);
    return y;
}

double SymMatrix::quad(const Vec& u) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        const double* row = a_.data() + i * n_;
        double rowacc = 0.0;
        for (std::size_t j = 0; j < n_; ++j) rowacc += row[j] * u[j];
        acc += u[i] * rowacc;
    }
    return acc;
}

double SymMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += at(i, i);
    return t;
}

double SymMatrix::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
}

SymMatrix& SymMatrix::add_scaled(const SymMatrix& other, double alpha) {
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += alpha * other.a_[k];
    return *this;
}

SymMatrix& SymMatrix::scale(double alpha) {
    for (double& v : a_) v *= alpha;
    return *this;
}

double dot(const Vec& a, const Vec& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const Vec& x, Vec& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vec scaled(const Vec& x, double alpha) {
    Vec y(x);
    for (double& v : y) v *= alpha;
    return y;
}

Vec vsub(const Vec& a, const Vec& b) {
    Vec y(a);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= b[i];
    return y;
}

double max_abs(const Vec& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

CgResult cg_solve(const SymMatrix& A, const Vec& b, double rel_tol, std::size_t max_iter,
                  const Vec* x0) {
    const std::size_t n = A.size();
    if (max_iter == 0) max_iter = 10 * n + 50;

    Vec diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d = A.at(i, i);
        if (d <= 0.0) throw NumericalError("cg: nonpositive diagonal, matrix not SPD");
        diag[i] = 1.0 / d;
    }

    CgResult out;
    out.x = x0 ? *x0 : Vec(n, 0.0);

    Vec r(n), z(n), p(n), q(n);
    A.matvec(out.x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];

    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        out.x.assign(n, 0.0);
        return out;
    }

    for (std::size_t i = 0; i < n; ++i) z[i] = diag[i] * r[i];
    p = z;
    double rho = dot(r, z);
    double rnorm = norm2(r);

    std::size_t it = 0;
    while (rnorm > rel_tol * bnorm && it < max_iter) {
        A.matvec(p, q);
        const double pq = dot(p, q);
        if (pq <= 0.0) throw NumericalError("cg: breakdown, p^T A p = " + format17(pq));
        const double alpha = rho / pq;
        axpy(alpha, p, out.x);
        axpy(-alpha, q, r);
        for (std::size_t i = 0; i < n; ++i) z[i] = diag[i] * r[i];
        const double rho_new = dot(r, z);
        const double beta = rho_new / rho;
        rho = rho_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        rnorm = norm2(r);
        ++it;
    }
    out.iterations = it;
    out.rel_residual = rnorm / bnorm;
    if (out.rel_residual > rel_tol) {
        throw NumericalError("cg: no convergence after " + std::to_string(it) +
                             " iterations, rel residual " + format17(out.rel_residual));
    }
    return out;
}

double min_generalized_eigenvalue(const SymMatrix& A, const SymMatrix& M, double shift,
                                  double tol, std::size_t max_iter) {
    const std::size_t n = A.size();
    SymMatrix B(A);
    B.add_scaled(M, shift);

    Rng rng(0x5eedf00dULL);
    Vec v(n);
    for (double& x : v) x = rng.sym();
    double vnorm = std::sqrt(M.quad(v));
    for (double& x : v) x /= vnorm;

    double rho_prev = 0.0;
    Vec mv(n);
    for (std::size_t it = 0; it < max_iter; ++it) {
        M.matvec(v, mv);
        Vec w = cg_solve(B, mv, 1e-13).x;
        const double wnorm = std::sqrt(M.quad(w));
        if (!(wnorm > 0.0)) throw NumericalError("inverse iteration: degenerate iterate");
        for (double& x : w) x /= wnorm;
        const double rho = A.quad(w) / M.quad(w);
        v = std::move(w);
        const double scale = std::abs(rho) + std::abs(shift) + 1.0;
        if (it > 2 && std::abs(rho - rho_prev) <= tol * scale) return rho;
        rho_prev = rho;
    }
    throw NumericalError("inverse iteration: no convergence after " + std::to_string(max_iter) +
                         " iterations");
}

double max_eigenvalue_sym(const SymMatrix& A, double tol, std::size_t max_iter) {
    const std::size_t n = A.size();
    Rng rng(0xabcdef12ULL);
    Vec v(n);
    for (double& x : v) x = rng.sym();
    double nrm = norm2(v);
    for (double& x : v) x /= nrm;

    double lam_prev = 0.0;
    Vec w(n);
    for (std::size_t it = 0; it < max_iter; ++it) {
        A.matvec(v, w);
        const double lam = dot(v, w);
        nrm = norm2(w);
        if (nrm == 0.0) return 0.0;
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nrm;
        if (it > 2 && std::abs(lam - lam_prev) <= tol * (std::abs(lam) + 1.0)) return lam;
        lam_prev = lam;
    }
    return lam_prev;
}

double min_eigenvalue_sym(const SymMatrix& A, double tol) {
    // Gershgorin upper bound, then largest eigenvalue of sigma*I - A.
    const std::size_t n = A.size();
    double sigma = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double rowsum = 0.0;
        for (std::size_t j = 0; j < n; ++j) rowsum += std::abs(A.at(i, j));
        sigma = std::max(sigma, rowsum);
    }
    SymMatrix B(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) B.at(i, j) = (i == j ? sigma : 0.0) - A.at(i, j);
    const double mu = max_eigenvalue_sym(B, tol);
    return sigma - mu;
}

}  // namespace fracflow
