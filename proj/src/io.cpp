#include "fracflow/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fracflow/util.hpp"

namespace fracflow {

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path.string());
    out << content;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string content_hash(const std::filesystem::path& path) {
    const std::string bytes = read_text_file(path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    static const char* hex = "0123456789abcdef";
    for (int k = 0; k < 16; ++k) buf[k] = hex[(h >> (60 - 4 * k)) & 0xF];
    buf[16] = '\0';
    return std::string(buf);
}

std::string sweep_csv(const SweepResult& result) {
    std::ostringstream out;
    for (std::size_t c = 0; c < result.columns.size(); ++c) {
        if (c) out << ",";
        out << result.columns[c];
    }
    out << "\n";
    for (const auto& row : result.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ",";
            out << format17(row[c]);
        }
        out << "\n";
    }
    return out.str();
}

Json sweep_summary(const SweepResult& result) {
    Json j;
    j["name"] = result.name;
    Json stats = Json::object();
    for (const auto& [k, v] : result.stats) stats[k] = v;
    j["stats"] = stats;
    Json checks = Json::object();
    for (const auto& [k, v] : result.checks) checks[k] = v;
    j["checks"] = checks;
    j["pass"] = result.all_ok();
    return j;
}

std::string trajectory_csv(const Trajectory& traj) {
    std::ostringstream out;
    out << "t,energy,increment\n";
    for (std::size_t k = 0; k < traj.step_count(); ++k) {
        const double t = static_cast<double>(k) * traj.tau();
        const double incr = k == 0 ? 0.0 : traj.increments()[k - 1];
        out << format17(t) << "," << format17(traj.energies()[k]) << "," << format17(incr) << "\n";
    }
    return out.str();
}

void write_manifest(const std::filesystem::path& dir, const Json& config,
                    const std::vector<std::string>& files) {
    Json manifest;
    manifest["artifact"] = "fracflow";
    manifest["version"] = "1.0.0";
    Json convention;
    convention["half_double_integral"] = true;
    convention["split_radius"] = 1.0;
    manifest["convention"] = convention;
    manifest["config"] = config;
    Json hashes = Json::object();
    std::vector<std::string> sorted = files;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& name : sorted) hashes[name] = content_hash(dir / name);
    manifest["files"] = hashes;
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

namespace {

struct AxisMap {
    double lo, hi;
    bool log;
    double map01(double v) const {
        const double a = log ? std::log10(lo) : lo;
        const double b = log ? std::log10(hi) : hi;
        const double x = log ? std::log10(v) : v;
        return b == a ? 0.5 : (x - a) / (b - a);
    }
};

}  // namespace

std::string render_svg_chart(const std::string& title, const std::vector<SvgSeries>& series,
                             bool log_log) {
    constexpr int W = 640, H = 420, ML = 70, MR = 20, MT = 40, MB = 50;
    double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
    bool first = true;
    for (const auto& s : series) {
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            if (log_log && (s.x[k] <= 0.0 || s.y[k] <= 0.0))
                throw ConfigError("svg: log-log chart needs positive data");
            if (first) {
                xlo = xhi = s.x[k];
                ylo = yhi = s.y[k];
                first = false;
            }
            xlo = std::min(xlo, s.x[k]);
            xhi = std::max(xhi, s.x[k]);
            ylo = std::min(ylo, s.y[k]);
            yhi = std::max(yhi, s.y[k]);
        }
    }
    if (first) throw ConfigError("svg: no data");
    if (!log_log) {
        const double pad = 0.05 * (yhi - ylo + 1e-300);
        ylo -= pad;
        yhi += pad;
    }
    const AxisMap xm{xlo, xhi, log_log}, ym{ylo, yhi, log_log};
    auto px = [&](double v) { return ML + xm.map01(v) * (W - ML - MR); };
    auto py = [&](double v) { return H - MB - ym.map01(v) * (H - MT - MB); };

    static const char* colors[] = {"#1f6fb2", "#c23b22", "#2e8b57", "#8b5e3c", "#6a5acd", "#444444"};
    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='15' font-family='sans-serif'>"
        << title << "</text>\n";
    svg << "<rect x='" << ML << "' y='" << MT << "' width='" << (W - ML - MR) << "' height='"
        << (H - MT - MB) << "' fill='none' stroke='#888'/>\n";
    // Corner labels instead of full tick machinery.
    svg << "<text x='" << ML << "' y='" << H - MB + 18 << "' font-size='11' font-family='sans-serif'>"
        << format17(xlo) << "</text>\n";
    svg << "<text x='" << W - MR << "' y='" << H - MB + 18
        << "' text-anchor='end' font-size='11' font-family='sans-serif'>" << format17(xhi) << "</text>\n";
    svg << "<text x='" << ML - 6 << "' y='" << H - MB << "' text-anchor='end' font-size='11' font-family='sans-serif'>"
        << format17(ylo) << "</text>\n";
    svg << "<text x='" << ML - 6 << "' y='" << MT + 10
        << "' text-anchor='end' font-size='11' font-family='sans-serif'>" << format17(yhi) << "</text>\n";

    int ci = 0;
    for (const auto& s : series) {
        const char* color = colors[ci % 6];
        svg << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            if (k) svg << " ";
            svg << px(s.x[k]) << "," << py(s.y[k]);
        }
        svg << "'/>\n";
        svg << "<text x='" << W - MR - 6 << "' y='" << MT + 16 + 14 * ci
            << "' text-anchor='end' font-size='11' font-family='sans-serif' fill='" << color << "'>"
            << s.label << "</text>\n";
        ++ci;
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace fracflow
