#include "fracflow/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "fracflow/util.hpp"

namespace fracflow {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

KernelExponent KernelExponent::fractional(double s_) {
    if (!(s_ >= 0.0 && s_ < 1.0)) throw ConfigError("kernel exponent: s must lie in [0, 1)");
    return KernelExponent{s_, false};
}

RangeClip RangeClip::band(double lo, double hi) {
    if (!(lo >= 0.0) || !(lo < hi)) throw ConfigError("range clip: need 0 <= r_lo < r_hi");
    return RangeClip{lo, hi};
}

double antideriv2(double q, double t) {
    if (std::isnan(q) || std::isnan(t)) throw NumericalError("antideriv2: NaN input");
    if (t < 0.0) throw NumericalError("antideriv2: negative argument");
    if (q == -1.0) return t == 0.0 ? 0.0 : t * std::log(t) - t;
    if (q == -2.0) {
        if (t == 0.0) throw NumericalError("antideriv2: log branch diverges at t = 0");
        return -std::log(t);
    }
    if (t == 0.0) {
        if (q < -2.0) throw NumericalError("antideriv2: t^(q+2) diverges at t = 0 for q < -2");
        return 0.0;
    }
    return std::pow(t, q + 2.0) / ((q + 1.0) * (q + 2.0));
}

double pow_integral(double p, double a, double b) {
    if (std::isnan(p) || std::isnan(a) || std::isnan(b)) throw NumericalError("pow_integral: NaN input");
    if (!(a >= 0.0) || !(b >= a)) throw NumericalError("pow_integral: need 0 <= a <= b");
    if (a == b) return 0.0;

    if (std::isinf(b)) {
        if (p >= -1.0) throw NumericalError("pow_integral: tail of t^" + format17(p) + " diverges");
        return -std::pow(a, p + 1.0) / (p + 1.0);
    }
    if (a == 0.0) {
        if (p <= -1.0) throw NumericalError("pow_integral: t^" + format17(p) + " not integrable at 0");
        return std::pow(b, p + 1.0) / (p + 1.0);
    }
    if (p == -1.0) return std::log(b / a);
    const double e = p + 1.0;
    if (std::abs(e) < 1e-8) {
        // (b^e - a^e)/e with cancellation control near the log branch.
        const double u = e * std::log(b / a);
        return std::pow(a, e) * std::log(b / a) * (u == 0.0 ? 1.0 : std::expm1(u) / u);
    }
    return (std::pow(b, e) - std::pow(a, e)) / e;
}

double pair_integral_pc(double gap, double h, double q, const RangeClip& clip) {
    if (std::isnan(gap) || std::isnan(h) || std::isnan(q)) throw NumericalError("pair_integral_pc: NaN input");
    if (!(gap >= 0.0)) throw ConfigError("pair_integral_pc: gap must be >= 0");
    if (!(h > 0.0)) throw ConfigError("pair_integral_pc: h must be > 0");

    // The pair-distance density of two length-h intervals at distance `gap`
    // is the tent rising from 0 at t = gap to h at t = gap + h and back.
    const double lo = std::max(gap, clip.r_lo);
    const double hi = std::min(gap + 2.0 * h, clip.r_hi);
    if (lo >= hi) return 0.0;

    if (lo == 0.0 && q <= -2.0)
        throw NumericalError("pair_integral_pc: divergent, touching intervals with q <= -2");

    double acc = 0.0;
    // Rising edge: (t - gap) * t^q on [gap, gap+h].
    {
        const double a = std::max(lo, gap), b = std::min(hi, gap + h);
        if (a < b) {
            acc += pow_integral(q + 1.0, a, b);
            if (gap != 0.0) acc -= gap * pow_integral(q, a, b);
        }
    }
    // Falling edge: (gap + 2h - t) * t^q on [gap+h, gap+2h].
    {
        const double a = std::max(lo, gap + h), b = std::min(hi, gap + 2.0 * h);
        if (a < b) acc += (gap + 2.0 * h) * pow_integral(q, a, b) - pow_integral(q + 1.0, a, b);
    }
    return acc;
}

double cubic_bspline(double x) {
    const double t = std::abs(x);
    if (t >= 2.0) return 0.0;
    if (t >= 1.0) {
        const double u = 2.0 - t;
        return u * u * u / 6.0;
    }
    return 2.0 / 3.0 - t * t + t * t * t / 2.0;
}

namespace {

// Cubic polynomial with coefficients in increasing degree.
using Cubic = std::array<double, 4>;

// Coefficients of b3 on the branch containing eta (branch chosen by midpoint
// of the evaluation interval), as a polynomial in eta.
Cubic bspline_branch(double eta) {
    if (eta <= -2.0 || eta >= 2.0) return {0.0, 0.0, 0.0, 0.0};
    if (eta <= -1.0) return {8.0 / 6.0, 12.0 / 6.0, 6.0 / 6.0, 1.0 / 6.0};   // (2+eta)^3/6
    if (eta <= 0.0) return {2.0 / 3.0, 0.0, -1.0, -0.5};                      // 2/3 - eta^2 - eta^3/2
    if (eta <= 1.0) return {2.0 / 3.0, 0.0, -1.0, 0.5};                       // 2/3 - eta^2 + eta^3/2
    return {8.0 / 6.0, -12.0 / 6.0, 6.0 / 6.0, -1.0 / 6.0};                   // (2-eta)^3/6
}

// Polynomial in xi for b3(xi - c) on an interval whose image under xi -> xi-c
// stays inside one branch; `probe` is any interior point of the interval.
Cubic shifted_bspline(double c, double probe) {
    const Cubic p = bspline_branch(probe - c);
    // Expand sum_k p[k] (xi - c)^k.
    Cubic out{0.0, 0.0, 0.0, 0.0};
    for (int k = 0; k <= 3; ++k) {
        if (p[static_cast<std::size_t>(k)] == 0.0) continue;
        // binomial expansion of (xi - c)^k
        double binom = 1.0;
        for (int r = 0; r <= k; ++r) {
            const double coeff = p[static_cast<std::size_t>(k)] * binom *
                                 std::pow(-c, static_cast<double>(k - r));
            out[static_cast<std::size_t>(r)] += coeff;
            binom = binom * static_cast<double>(k - r) / static_cast<double>(r + 1);
        }
    }
    return out;
}

Cubic add(const Cubic& a, const Cubic& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}

// Integral of xi^q * poly(xi) over [a, b].
double integrate_cubic_against_power(const Cubic& poly, double q, double a, double b) {
    double acc = 0.0;
    for (int k = 0; k <= 3; ++k) {
        const double c = poly[static_cast<std::size_t>(k)];
        if (c == 0.0) continue;
        acc += c * pow_integral(q + static_cast<double>(k), a, b);
    }
    return acc;
}

// Integral of (m + eta)^q * poly(eta) over [a, b] with |eta| <= 2 <= m/2,
// via the binomial series in eta/m. The global-monomial route loses ~m^3
// in cancellation for distant pairs; this form is uniformly stable and
// handles the log branches implicitly.
double far_series_integral(double q, double m, const Cubic& poly, double a, double b) {
    double apow = a, bpow = b;  // a^{t+1}, b^{t+1}
    double coeff = 1.0;         // binomial C(q, k)
    double mk = 1.0;            // m^{-k}
    double acc = 0.0;
    for (int k = 0; k < 200; ++k) {
        // moment: int eta^k poly(eta) d eta
        double ap = apow, bp = bpow;
        double mom = 0.0;
        for (int j = 0; j <= 3; ++j) {
            mom += poly[static_cast<std::size_t>(j)] * (bp - ap) / static_cast<double>(k + j + 1);
            ap *= a;
            bp *= b;
        }
        const double term = coeff * mk * mom;
        acc += term;
        if (k >= 8 && std::abs(term) <= 1e-17 * std::abs(acc)) break;
        coeff *= (q - static_cast<double>(k)) / static_cast<double>(k + 1);
        mk /= m;
        apow *= a;
        bpow *= b;
    }
    return std::pow(m, q) * acc;
}

// Sum over pieces of int_{[lo,hi]} xi^q b3(xi - m) d xi for a distant offset
// (m >= 4, so the +m mirror term and the correlation at 0 both vanish).
double far_band_integral(double q, double m, double lo, double hi) {
    const double band_lo = std::max(lo, m - 2.0);
    const double band_hi = std::min(hi, m + 2.0);
    double acc = 0.0;
    for (int v = -2; v < 2; ++v) {
        const double a = std::max(band_lo, m + static_cast<double>(v));
        const double b = std::min(band_hi, m + static_cast<double>(v + 1));
        if (a >= b) continue;
        const Cubic poly = bspline_branch(0.5 * (a + b) - m);
        acc += far_series_integral(q, m, poly, a - m, b - m);
    }
    return acc;
}

// Breakpoints of b3(xi -+ m) within [0, m+2], plus the clip radii.
std::vector<double> gather_breaks(double m, double lo, double hi) {
    std::vector<double> pts{lo};
    auto push = [&](double x) {
        if (x > lo && x < hi) pts.push_back(x);
    };
    for (int v = -2; v <= 2; ++v) {
        push(m + static_cast<double>(v));
        push(-m + static_cast<double>(v));
    }
    push(m + 2.0);
    if (std::isfinite(hi)) pts.push_back(hi);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

void check_indices(const Grid& grid, std::size_t i, std::size_t j) {
    if (i >= grid.n() || j >= grid.n()) throw ConfigError("hat entry: node index out of range");
}

}  // namespace

double hat_pair_entry(const Grid& grid, std::size_t i, std::size_t j, const KernelExponent& kexp,
                      const RangeClip& clip) {
    check_indices(grid, i, j);
    const double h = grid.h();

    if (kexp.dirichlet) {
        // Local gradient form: integral of phi_i' phi_j'.
        const std::size_t m = i > j ? i - j : j - i;
        if (m == 0) return 2.0 / h;
        if (m == 1) return -1.0 / h;
        return 0.0;
    }

    const double q = kexp.q();
    const double m = static_cast<double>(i > j ? i - j : j - i);

    // Work on the unit-spacing grid; the entry scales as h^{q+2}.
    const double lo = clip.r_lo / h;
    const double hi = clip.r_hi / h;  // inf stays inf
    if (lo >= hi) return 0.0;

    // The integrand is xi^q * D(xi) with
    //   D(xi) = 2 b3(m) - b3(xi - m) - b3(xi + m),
    // piecewise cubic up to xi = m+2 and constant 2 b3(m) beyond.
    const double support_end = m + 2.0;
    const double tail_const = 2.0 * cubic_bspline(m);

    if (m >= 4.0)
        return -far_band_integral(q, m, lo, std::min(hi, support_end)) * std::pow(h, q + 2.0);

    // First breakpoint of the piecewise-cubic structure after 0; D and D'
    // vanish at 0 identically (b3 is C^2 and even), so on the whole piece
    // [0, first_natural) the constant and linear coefficients cancel in exact
    // arithmetic and are zeroed instead of integrating roundoff against xi^q.
    double first_natural = support_end;
    for (int v = -2; v <= 2; ++v) {
        for (double cand : {m + static_cast<double>(v), -m + static_cast<double>(v)})
            if (cand > 0.0) first_natural = std::min(first_natural, cand);
    }

    double acc = 0.0;
    const double core_hi = std::min(hi, support_end);
    if (lo < core_hi) {
        const auto pts = gather_breaks(m, lo, core_hi);
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
            const double a = pts[k], b = pts[k + 1];
            const double probe = 0.5 * (a + b);
            Cubic poly = add(shifted_bspline(m, probe), shifted_bspline(-m, probe));
            for (double& c : poly) c = -c;
            poly[0] += tail_const;
            if (b <= first_natural) {
                poly[0] = 0.0;
                poly[1] = 0.0;
            }
            acc += integrate_cubic_against_power(poly, q, a, b);
        }
    }
    // Constant tail beyond the correlation support.
    const double tail_lo = std::max(lo, support_end);
    if (tail_lo < hi && tail_const != 0.0) {
        if (std::isinf(hi) && q >= -1.0)
            throw NumericalError("hat_pair_entry: unclipped far tail diverges at s = 0 for |i-j| <= 1");
        acc += tail_const * pow_integral(q, tail_lo, hi);
    }
    return acc * std::pow(h, q + 2.0);
}

double hat_product_entry(const Grid& grid, std::size_t i, std::size_t j, const KernelExponent& kexp,
                         const RangeClip& clip) {
    check_indices(grid, i, j);
    if (kexp.dirichlet) throw ConfigError("hat_product_entry: product form needs a fractional kernel");
    const double h = grid.h();
    const double q = kexp.q();
    const double m = static_cast<double>(i > j ? i - j : j - i);

    const double lo = clip.r_lo / h;
    const double hi = std::min(clip.r_hi / h, m + 2.0);  // correlation support ends at m+2
    if (lo >= hi) return 0.0;

    // Integrand xi^q * (b3(xi - m) + b3(xi + m)) on xi > 0.
    if (lo == 0.0 && m < 2.0 && q <= -1.0)
        throw NumericalError("hat_product_entry: kernel not integrable at 0 without a lower clip");

    if (m >= 4.0) return far_band_integral(q, m, lo, hi) * std::pow(h, q + 2.0);

    const auto pts = gather_breaks(m, lo, hi);
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const double a = pts[k], b = pts[k + 1];
        const double probe = 0.5 * (a + b);
        const Cubic poly = add(shifted_bspline(m, probe), shifted_bspline(-m, probe));
        acc += integrate_cubic_against_power(poly, q, a, b);
    }
    return acc * std::pow(h, q + 2.0);
}

}  // namespace fracflow
