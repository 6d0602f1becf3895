#include "fracflow/grid.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "fracflow/util.hpp"

namespace fracflow {

Grid::Grid(Domain domain, std::size_t n) : domain_(domain), n_(n) {
    if (!(domain.a < domain.b)) throw ConfigError("grid: domain requires a < b");
    if (n < 3) throw ConfigError("grid: need at least 3 interior nodes");
    h_ = (domain.b - domain.a) / static_cast<double>(n + 1);
    nodes_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        nodes_[i] = domain.a + static_cast<double>(i + 1) * h_;
}

double Grid::hat(std::size_t i, double x) const {
    const double t = std::abs(x - nodes_[i]) / h_;
    return t >= 1.0 ? 0.0 : 1.0 - t;
}

std::string Grid::fingerprint() const {
    return format17(domain_.a) + ";" + format17(domain_.b) + ";" + std::to_string(n_);
}

GridPtr make_grid(Domain domain, std::size_t n) {
    return std::make_shared<const Grid>(domain, n);
}

GridFunction::GridFunction(GridPtr grid, Vec coeffs)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_->n()) throw ConfigError("grid function: coefficient count mismatch");
}

GridFunction::GridFunction(GridPtr grid) : grid_(std::move(grid)), coeffs_(grid_->n(), 0.0) {}

double GridFunction::eval(double x) const {
    const Grid& g = *grid_;
    if (x <= g.domain().a || x >= g.domain().b) return 0.0;
    // x lies in exactly one cell [a + k h, a + (k+1) h]; only the two
    // surrounding hats are nonzero there.
    const double rel = (x - g.domain().a) / g.h();
    auto k = static_cast<long long>(std::floor(rel));
    double v = 0.0;
    for (long long i = k - 1; i <= k + 1; ++i) {
        if (i >= 1 && i <= static_cast<long long>(g.n()))
            v += coeffs_[static_cast<std::size_t>(i - 1)] * g.hat(static_cast<std::size_t>(i - 1), x);
    }
    return v;
}

void GridFunction::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << "x,u\n";
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        out << format17(grid_->node(i)) << "," << format17(coeffs_[i]) << "\n";
}

GridFunction GridFunction::read_csv(GridPtr grid, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("x,u", 0) != 0)
        throw ConfigError("bad csv header in " + path + " (expected 'x,u')");
    Vec coeffs;
    coeffs.reserve(grid->n());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError("bad csv row in " + path);
        coeffs.push_back(parse_double(line.substr(comma + 1)));
    }
    if (coeffs.size() != grid->n())
        throw ConfigError("csv node count " + std::to_string(coeffs.size()) + " does not match grid n=" +
                          std::to_string(grid->n()));
    return GridFunction(std::move(grid), std::move(coeffs));
}

GridFunction sample(const ScalarField& f, GridPtr grid) {
    Vec coeffs(grid->n());
    for (std::size_t i = 0; i < grid->n(); ++i) coeffs[i] = f(grid->node(i));
    return GridFunction(std::move(grid), std::move(coeffs));
}

ScalarField bump_field(const Domain& domain, double center, double width) {
    if (!(width > 0.0)) throw ConfigError("bump: width must be positive");
    const double half = 0.5 * width;
    if (center - half <= domain.a || center + half >= domain.b)
        throw ConfigError("bump: support must lie strictly inside the domain");
    return [center, half](double x) {
        const double xi = (x - center) / half;
        const double t = 1.0 - xi * xi;
        return t <= 0.0 ? 0.0 : std::exp(1.0 - 1.0 / t);
    };
}

ScalarField bump_field(const Domain& domain, double margin) {
    if (!(margin > 0.0 && margin < 0.5)) throw ConfigError("bump: margin must be in (0, 0.5)");
    const double width = domain.length() * (1.0 - 2.0 * margin);
    return bump_field(domain, domain.center(), width);
}

ScalarField sine_mode_field(const Domain& domain, unsigned k) {
    if (k < 1) throw ConfigError("sine_mode: k must be >= 1");
    const double a = domain.a, len = domain.length();
    const double kd = static_cast<double>(k);
    constexpr double pi = 3.14159265358979323846;
    return [a, len, kd](double x) { return std::sin(kd * pi * (x - a) / len); };
}

namespace {
// exp(-1/xi) transition; S is C^inf, 0 for xi<=0, 1 for xi>=1.
double smooth_step(double xi) {
    auto g = [](double t) { return t <= 0.0 ? 0.0 : std::exp(-1.0 / t); };
    const double num = g(xi);
    const double den = num + g(1.0 - xi);
    return den == 0.0 ? 0.0 : num / den;
}
}  // namespace

ScalarField plateau_field(const Domain& domain, double margin) {
    if (!(margin > 0.0 && margin < 0.5)) throw ConfigError("plateau: margin must be in (0, 0.5)");
    const double L = domain.length();
    const double lo = domain.a + margin * L;  // zero below lo, one above lo + margin*L
    const double hi = domain.b - margin * L;  // zero above hi, one below hi - margin*L
    const double w = margin * L;
    return [lo, hi, w](double x) { return smooth_step((x - lo) / w) * smooth_step((hi - x) / w); };
}

ScalarField builtin_family(const std::string& name, const Domain& domain,
                           const std::vector<double>& params) {
    if (name == "bump") {
        if (params.empty()) return bump_field(domain);
        if (params.size() == 1) return bump_field(domain, params[0]);
        return bump_field(domain, params[0], params[1]);
    }
    if (name == "sine_mode") {
        const double k = params.empty() ? 1.0 : params[0];
        if (k < 1.0 || k != std::floor(k)) throw ConfigError("sine_mode: k must be a positive integer");
        return sine_mode_field(domain, static_cast<unsigned>(k));
    }
    if (name == "plateau") {
        return plateau_field(domain, params.empty() ? 0.1 : params[0]);
    }
    throw ConfigError("unknown function family: '" + name + "'");
}

}  // namespace fracflow
