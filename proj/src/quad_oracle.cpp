#include "fracflow/quad_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fracflow/util.hpp"

namespace fracflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Gauss-Kronrod 7/15 nodes and weights (positive half).
constexpr double kXgk[8] = {0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
                            0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
                            0.2077849550078985, 0.0};
constexpr double kWgk[8] = {0.02293532201052922, 0.06309209262997855, 0.10479001032225018,
                            0.14065325971552592, 0.1690047266392679,  0.19035057806478542,
                            0.20443294007529889, 0.20948214108472782};
constexpr double kWg[4] = {0.12948496616886969, 0.27970539148927664, 0.3818300505051189,
                           0.41795918367346940};

struct GkEstimate {
    double i15;
    double err;
};

GkEstimate gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double hl = 0.5 * (b - a);
    double i15 = kWgk[7] * f(c);
    double i7 = kWg[3] * f(c);
    for (int k = 0; k < 7; ++k) {
        const double fv = f(c - hl * kXgk[k]) + f(c + hl * kXgk[k]);
        i15 += kWgk[k] * fv;
        if (k % 2 == 1) i7 += kWg[k / 2] * fv;
    }
    i15 *= hl;
    i7 *= hl;
    return {i15, std::abs(i15 - i7)};
}

double adaptive_gk_rec(const std::function<double(double)>& f, double a, double b, double abs_tol,
                       double noise_floor, int depth) {
    const GkEstimate e = gk15(f, a, b);
    if (e.err <= std::max(abs_tol, noise_floor) || b - a <= 1e-300) return e.i15;
    if (depth <= 0)
        throw NumericalError("adaptive quadrature: subdivision limit reached, estimate " +
                             format17(e.i15) + ", error " + format17(e.err));
    const double c = 0.5 * (a + b);
    return adaptive_gk_rec(f, a, c, 0.5 * abs_tol, noise_floor, depth - 1) +
           adaptive_gk_rec(f, c, b, 0.5 * abs_tol, noise_floor, depth - 1);
}

}  // namespace

double adaptive_gk(const std::function<double(double)>& f, double a, double b, double abs_tol,
                   int max_depth, double noise_floor) {
    if (a == b) return 0.0;
    return adaptive_gk_rec(f, a, b, abs_tol, noise_floor, max_depth);
}

namespace {

// phi(x) - phi(x + t) without cancellation: when both arguments fall in the
// same linear piece the difference is exactly -slope * t, which matters for
// t far below the grid spacing where the direct difference loses digits
// against the t^q amplification.
double stable_hat_difference(const Grid& grid, std::size_t i, double x, double t) {
    const double h = grid.h();
    const double u1 = x - grid.node(i);
    const double u2 = u1 + t;
    auto piece = [h](double u) { return u <= -h ? 0 : (u <= 0.0 ? 1 : (u < h ? 2 : 3)); };
    const int p1 = piece(u1), p2 = piece(u2);
    if (p1 == p2) {
        if (p1 == 1) return -t / h;
        if (p1 == 2) return t / h;
        return 0.0;
    }
    return grid.hat(i, x) - grid.hat(i, x + t);
}

// Numeric hat-pair cross sections. Both are integrals over x of piecewise
// quadratics; splitting at the breakpoints makes the fixed rule exact.
class HatCrossSection {
public:
    HatCrossSection(const Grid& grid, std::size_t i, std::size_t j)
        : grid_(grid), i_(i), j_(j) {
        const double h = grid.h();
        base_breaks_ = {grid.node(i) - h, grid.node(i), grid.node(i) + h,
                        grid.node(j) - h, grid.node(j), grid.node(j) + h};
    }

    // g(t) = int (phi_i(x) - phi_i(x+t)) (phi_j(x) - phi_j(x+t)) dx
    double difference(double t) const {
        return integrate([&](double x) {
            return stable_hat_difference(grid_, i_, x, t) * stable_hat_difference(grid_, j_, x, t);
        }, t);
    }

    // p(t) + p(-t) with p(t) = int phi_i(x) phi_j(x+t) dx
    double product_sym(double t) const {
        return integrate([&](double x) {
            return grid_.hat(i_, x) * (grid_.hat(j_, x + t) + grid_.hat(j_, x - t));
        }, t);
    }

private:
    template <class F>
    double integrate(const F& f, double t) const {
        std::vector<double> pts;
        pts.reserve(2 * base_breaks_.size());
        for (double x : base_breaks_) {
            pts.push_back(x);
            pts.push_back(x - t);
            pts.push_back(x + t);
        }
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
            const GkEstimate e = gk15(f, pts[k], pts[k + 1]);
            acc += e.i15;
        }
        return acc;
    }

    const Grid& grid_;
    std::size_t i_, j_;
    std::vector<double> base_breaks_;
};

// Integrates kernel_weight(t) * t^q over [a, b] adaptively, where a may sit
// on the diagonal (t = 0). A power substitution t = tau^gamma flattens the
// integrable singularity before the adaptive pass.
double integrate_kernel_piece(const std::function<double(double)>& weight, double q, double a,
                              double b, double abs_tol, double noise_floor) {
    if (a >= b) return 0.0;
    if (a > 0.0) {
        return adaptive_gk([&](double t) { return weight(t) * std::pow(t, q); }, a, b, abs_tol, 52,
                           noise_floor);
    }
    // weight(t) = O(t^2) near 0 for the difference form; gamma keeps the
    // transformed integrand at least C^2 at the origin.
    const double gamma = std::clamp(std::ceil(3.0 / (q + 3.0)), 2.0, 48.0);
    const double upper = std::pow(b, 1.0 / gamma);
    return adaptive_gk(
        [&](double tau) {
            const double t = std::pow(tau, gamma);
            if (t == 0.0) return 0.0;
            return weight(t) * std::pow(t, q) * gamma * std::pow(tau, gamma - 1.0);
        },
        0.0, upper, abs_tol, 52, noise_floor);
}

// Numeric tail of const * t^q over [a, hi] (hi possibly infinite) via the
// inversion w = 1/t and a flattening power map.
double integrate_power_tail(double q, double a, double hi, double abs_tol) {
    if (std::isfinite(hi)) {
        return adaptive_gk([&](double t) { return std::pow(t, q); }, a, hi, abs_tol);
    }
    if (q >= -1.0) throw NumericalError("oracle: tail of t^" + format17(q) + " diverges");
    const double beta = -q - 2.0;  // integrand w^beta on (0, 1/a]
    const double kappa = std::clamp(std::ceil(3.0 / (beta + 1.0)), 1.0, 48.0);
    const double upper = std::pow(1.0 / a, 1.0 / kappa);
    return adaptive_gk(
        [&](double sigma) {
            const double w = std::pow(sigma, kappa);
            if (w == 0.0) return 0.0;
            return std::pow(w, beta) * kappa * std::pow(sigma, kappa - 1.0);
        },
        0.0, upper, abs_tol);
}

std::vector<double> kernel_breaks(double delta_abs, double h, double lo, double hi_core) {
    std::vector<double> pts{lo};
    auto push = [&](double t) {
        if (t > lo && t < hi_core) pts.push_back(t);
    };
    for (int v = -2; v <= 2; ++v) push(delta_abs + static_cast<double>(v) * h);
    for (int v = 1; v <= 2; ++v) push(static_cast<double>(v) * h - delta_abs);
    push(h);
    push(2.0 * h);
    pts.push_back(hi_core);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

}  // namespace

double oracle_hat_pair_entry(const Grid& grid, std::size_t i, std::size_t j,
                             const KernelExponent& kexp, const RangeClip& clip, double rel_tol) {
    if (i >= grid.n() || j >= grid.n()) throw ConfigError("oracle: node index out of range");
    if (kexp.dirichlet) throw ConfigError("oracle: only fractional kernels are integrated");
    const double q = kexp.q();
    const double h = grid.h();
    const double delta = std::abs(grid.node(j) - grid.node(i));
    const double supp_end = delta + 2.0 * h;

    HatCrossSection cs(grid, i, j);
    const double lo = std::max(clip.r_lo, 0.0);
    const double hi = clip.r_hi;
    if (lo >= hi) return 0.0;

    // Constant value of the cross section beyond the correlation support.
    const double g_inf = cs.difference(supp_end + h);

    // Rough scale from a single sweep, then refine to the relative target.
    const double hi_core = std::min(hi, supp_end);
    auto piece_weight = [&](double t) { return cs.difference(t); };

    double scale = 0.0;
    std::vector<double> pts;
    if (lo < hi_core) {
        pts = kernel_breaks(delta, h, lo, hi_core);
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
            const double mid = 0.5 * (pts[k] + pts[k + 1]);
            scale += std::abs(piece_weight(mid) * std::pow(mid, q)) * (pts[k + 1] - pts[k]);
        }
    }
    scale += std::abs(g_inf);
    if (scale == 0.0) scale = 1.0;

    const double noise_floor = 1e-15 * scale;
    auto integrate_all = [&](double abs_tol) {
        double acc = 0.0;
        if (lo < hi_core) {
            const double piece_tol = abs_tol / static_cast<double>(pts.size());
            for (std::size_t k = 0; k + 1 < pts.size(); ++k)
                acc += integrate_kernel_piece(piece_weight, q, pts[k], pts[k + 1], piece_tol,
                                              noise_floor);
        }
        const double tail_lo = std::max(lo, supp_end);
        if (tail_lo < hi && std::abs(g_inf) > 1e-14 * scale) {
            if (std::isinf(hi) && q >= -1.0)
                throw NumericalError("oracle: unclipped far tail diverges at s = 0 for |i-j| <= 1");
            acc += g_inf * integrate_power_tail(q, tail_lo, hi, abs_tol);
        }
        return acc;
    };

    // First pass against the crude magnitude estimate, then once more with
    // the tolerance rescaled to the actual value: cancellation between
    // pieces can leave the entry far below the piecewise scale.
    double acc = integrate_all(rel_tol * scale);
    if (std::abs(acc) < 0.25 * scale)
        acc = integrate_all(rel_tol * std::max(std::abs(acc), 10.0 * noise_floor));
    // One half of the double integral, as in the energy convention; the
    // cross-section reduction integrates over t > 0 only, which accounts for
    // both orderings, so the half is already absorbed.
    return acc;
}

double oracle_hat_product_entry(const Grid& grid, std::size_t i, std::size_t j,
                                const KernelExponent& kexp, const RangeClip& clip, double rel_tol) {
    if (i >= grid.n() || j >= grid.n()) throw ConfigError("oracle: node index out of range");
    if (kexp.dirichlet) throw ConfigError("oracle: only fractional kernels are integrated");
    const double q = kexp.q();
    const double h = grid.h();
    const double delta = std::abs(grid.node(j) - grid.node(i));
    const double supp_end = delta + 2.0 * h;

    HatCrossSection cs(grid, i, j);
    const double lo = std::max(clip.r_lo, 0.0);
    const double hi = std::min(clip.r_hi, supp_end);
    if (lo >= hi) return 0.0;
    if (lo == 0.0 && q <= -1.0 && delta < 2.0 * h)
        throw NumericalError("oracle: product kernel not integrable at 0 without a lower clip");

    auto weight = [&](double t) { return cs.product_sym(t); };
    const auto pts = kernel_breaks(delta, h, lo, hi);
    double scale = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const double mid = 0.5 * (pts[k] + pts[k + 1]);
        scale += std::abs(weight(mid) * std::pow(mid, q)) * (pts[k + 1] - pts[k]);
    }
    if (scale == 0.0) return 0.0;
    const double noise_floor = 1e-15 * scale;
    auto integrate_all = [&](double abs_tol) {
        const double piece_tol = abs_tol / static_cast<double>(pts.size());
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 < pts.size(); ++k)
            acc += integrate_kernel_piece(weight, q, pts[k], pts[k + 1], piece_tol, noise_floor);
        return acc;
    };
    double acc = integrate_all(rel_tol * scale);
    if (std::abs(acc) < 0.25 * scale)
        acc = integrate_all(rel_tol * std::max(std::abs(acc), 10.0 * noise_floor));
    return acc;
}

double oracle_pair_integral_pc(double gap, double h, double q, const RangeClip& clip,
                               double rel_tol) {
    // I = [0, h], I' = [h + gap, 2h + gap]; inner integral over y for fixed x
    // has exact limits from the clip band.
    const double y0 = h + gap, y1 = 2.0 * h + gap;
    auto inner = [&](double x) {
        const double lo = std::max(y0, x + clip.r_lo);
        const double hi = std::isinf(clip.r_hi) ? y1 : std::min(y1, x + clip.r_hi);
        if (lo >= hi) return 0.0;
        const double sing = x + 1e-14 * h;
        return adaptive_gk([&](double y) { return std::pow(y - x, q); }, std::max(lo, sing), hi,
                           1e-13 * std::pow(h, q + 1.0) * h * (1.0 + std::abs(q)));
    };
    const GkEstimate rough = gk15(inner, 0.0, h);
    const double scale = std::max(std::abs(rough.i15), 1e-300);
    return adaptive_gk(inner, 0.0, h, rel_tol * scale);
}

}  // namespace fracflow
