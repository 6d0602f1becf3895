#include "fracflow/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>

#include "fracflow/util.hpp"

namespace fracflow {

namespace fs = std::filesystem;

namespace {

void check_keys(const Json& config, const std::set<std::string>& allowed, const std::string& ctx) {
    if (!config.is_object()) throw ConfigError(ctx + ": config must be a JSON object");
    for (auto it = config.begin(); it != config.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ConfigError(ctx + ": unknown config key '" + it.key() + "'");
    }
}

template <class T>
T require(const Json& config, const std::string& key, const std::string& ctx) {
    if (!config.contains(key)) throw ConfigError(ctx + ": missing required key '" + key + "'");
    try {
        return config.at(key).get<T>();
    } catch (const Json::exception&) {
        throw ConfigError(ctx + ": bad value for key '" + key + "'");
    }
}

template <class T>
T get_or(const Json& config, const std::string& key, T fallback) {
    if (!config.contains(key)) return fallback;
    try {
        return config.at(key).get<T>();
    } catch (const Json::exception&) {
        throw ConfigError("bad value for key '" + key + "'");
    }
}

Domain parse_domain(const Json& config, const std::string& ctx) {
    const Json j = require<Json>(config, "domain", ctx);
    check_keys(j, {"a", "b"}, ctx + ".domain");
    Domain d;
    d.a = require<double>(j, "a", ctx + ".domain");
    d.b = require<double>(j, "b", ctx + ".domain");
    return d;
}

MassMode parse_mass(const Json& config, const std::string& ctx, MassMode fallback) {
    const std::string name = get_or<std::string>(config, "mass", "");
    if (name.empty()) return fallback;
    if (name == "lumped") return MassMode::Lumped;
    if (name == "consistent") return MassMode::Consistent;
    throw ConfigError(ctx + ": mass must be 'lumped' or 'consistent'");
}

// u0 spec: {"family": name, "params": [...]} or {"csv_path": path}.
struct U0Spec {
    bool from_csv = false;
    std::string csv_path;
    std::string family;
    std::vector<double> params;

    ScalarField field(const Domain& domain) const {
        if (from_csv)
            throw ConfigError("this command resamples u0 across grids and needs a function-family u0");
        return builtin_family(family, domain, params);
    }

    GridFunction resolve(GridPtr grid) const {
        if (from_csv) {
            if (!fs::exists(csv_path)) throw ConfigError("u0 csv not found: " + csv_path);
            return GridFunction::read_csv(std::move(grid), csv_path);
        }
        const Domain dom = grid->domain();
        return sample(builtin_family(family, dom, params), std::move(grid));
    }
};

U0Spec parse_u0(const Json& config, const std::string& ctx) {
    const Json j = require<Json>(config, "u0", ctx);
    U0Spec spec;
    if (j.contains("csv_path")) {
        check_keys(j, {"csv_path"}, ctx + ".u0");
        spec.from_csv = true;
        spec.csv_path = require<std::string>(j, "csv_path", ctx + ".u0");
        return spec;
    }
    check_keys(j, {"family", "params"}, ctx + ".u0");
    spec.family = require<std::string>(j, "family", ctx + ".u0");
    spec.params = get_or<std::vector<double>>(j, "params", {});
    return spec;
}

std::vector<double> parse_list(const Json& config, const std::string& key, const std::string& ctx) {
    auto v = require<std::vector<double>>(config, key, ctx);
    if (v.empty()) throw ConfigError(ctx + ": '" + key + "' must not be empty");
    return v;
}

struct OutputSink {
    fs::path dir;
    std::vector<std::string> files;

    explicit OutputSink(const fs::path& d) : dir(d) { fs::create_directories(dir); }

    void write(const std::string& name, const std::string& content) {
        write_text_file(dir / name, content);
        files.push_back(name);
    }

    void finish(const Json& config) { write_manifest(dir, config, files); }
};

int finish_checked(const SweepResult& result, OutputSink& sink, const Json& config,
                   const CliOptions& opts) {
    sink.finish(config);
    if (opts.check && !result.all_ok()) {
        std::cerr << "check failures in " << result.name << ":\n";
        for (const auto& [k, ok] : result.checks)
            if (!ok) std::cerr << "  " << k << "\n";
        return 4;
    }
    return 0;
}

void maybe_svg(OutputSink& sink, const CliOptions& opts, const std::string& name,
               const std::string& title, const std::vector<SvgSeries>& series, bool log_log) {
    if (!opts.svg) return;
    sink.write(name, render_svg_chart(title, series, log_log));
}

double smallest_eig_ratio(const EnergyMatrix& m) {
    const double floor = m.mat.trace() / static_cast<double>(m.n());
    return min_eigenvalue_sym(m.mat) / std::max(floor, 1e-300);
}

}  // namespace

int cmd_energy(const Json& config, const CliOptions& opts) {
    const std::string ctx = "energy";
    check_keys(config, {"domain", "n", "u0", "s_list", "mass", "full_double_integral", "seed"}, ctx);
    const Domain domain = parse_domain(config, ctx);
    const auto n = require<std::size_t>(config, "n", ctx);
    const auto s_list = parse_list(config, "s_list", ctx);
    const bool full = get_or<bool>(config, "full_double_integral", false);
    const auto seed = get_or<std::uint64_t>(config, "seed", 12345);
    const MassMode mass_mode = parse_mass(config, ctx, MassMode::Consistent);

    GridPtr grid = make_grid(domain, n);
    const GridFunction u = parse_u0(config, ctx).resolve(grid);
    const Vec& c = u.coeffs();

    const EnergyMatrix mass_c = assemble_mass(grid, MassMode::Consistent);
    const double f0 = (kDOmegaD / 2.0) * mass_c.mat.quad(c);
    const EnergyMatrix dirichlet = assemble_dirichlet(grid);
    const double f1 = (kOmegaD / 4.0) * dirichlet.mat.quad(c);
    const EnergyMatrix near0 = assemble_near(grid, 0.0);
    const EnergyMatrix far0 = assemble_far(grid, 0.0);
    const double fhat0 = near0.mat.quad(c) + far0.mat.quad(c);

    const double conv = full ? 2.0 : 1.0;

    SweepResult table;
    table.name = "energy_table";
    table.columns = {"s", "F_s", "G_s", "J_s", "Fhat_s"};
    double worst_identity = 0.0;
    for (double s : s_list) {
        if (!(s > 0.0 && s < 1.0)) throw ConfigError(ctx + ": s values must lie in (0, 1)");
        const double fs_half = assemble_gagliardo(grid, s).mat.quad(c);
        const double g = assemble_near(grid, s).mat.quad(c);
        const double j = assemble_far(grid, s).mat.quad(c);
        const double fs_out = conv * fs_half;
        const double fhat_out = fs_out - f0 / s;
        table.rows.push_back({s, fs_out, g, j, fhat_out});
        // Identity residual under the half convention, independent of the
        // reporting flag.
        const double resid = std::abs((fs_half - f0 / s) - (g + j));
        const double scale = std::abs(fs_half) + std::abs(f0 / s) + std::abs(g) + std::abs(j) + 1e-300;
        worst_identity = std::max(worst_identity, resid / scale);
    }
    table.stat("Fhat0", fhat0);
    table.stat("F0", f0);
    table.stat("F1", f1);
    table.stat("worst_identity_residual", worst_identity);
    table.check("renormalization_identity", worst_identity <= 1e-8);

    if (opts.check) {
        // PSD certificates, scaled by trace/n.
        bool psd_ok = smallest_eig_ratio(near0) >= -1e-10 && smallest_eig_ratio(mass_c) >= -1e-10 &&
                      smallest_eig_ratio(dirichlet) >= -1e-10;
        if (!s_list.empty()) {
            const EnergyMatrix gag = assemble_gagliardo(grid, s_list.front());
            psd_ok = psd_ok && smallest_eig_ratio(gag) >= -1e-10;
        }
        table.check("psd_forms", psd_ok);

        // |J(u)| <= |Omega| ||u||^2 on random vectors.
        Rng rng(seed);
        bool far_bound = true;
        for (int rep = 0; rep < 100 && far_bound; ++rep) {
            Vec w(grid->n());
            for (double& x : w) x = rng.sym();
            const double jw = std::abs(far0.mat.quad(w));
            const double bound = domain.length() * mass_c.mat.quad(w);
            far_bound = jw <= bound * (1.0 + 1e-12);
        }
        table.check("far_field_bound", far_bound);
    }

    OutputSink sink(opts.out_dir);
    sink.write("energy.csv", sweep_csv(table));
    sink.write("summary.json", sweep_summary(table).dump(2) + "\n");
    std::cout << sweep_csv(table);
    std::cout << "Fhat0 = " << format17(fhat0) << ", F0 = " << format17(f0)
              << ", F1 = " << format17(f1) << "\n";
    (void)mass_mode;
    return finish_checked(table, sink, config, opts);
}

int cmd_flow(const Json& config, const CliOptions& opts) {
    const std::string ctx = "flow";
    check_keys(config, {"family", "s", "domain", "n", "tau", "T", "u0", "mass", "snapshot_times", "seed"},
               ctx);
    const Domain domain = parse_domain(config, ctx);
    const auto n = require<std::size_t>(config, "n", ctx);
    GridPtr grid = make_grid(domain, n);

    FlowSpec spec(parse_u0(config, ctx).resolve(grid));
    spec.family = flow_family_from_name(require<std::string>(config, "family", ctx));
    spec.s = get_or<double>(config, "s", 0.0);
    if (flow_family_needs_s(spec.family) && !config.contains("s"))
        throw ConfigError(ctx + ": family '" + flow_family_name(spec.family) + "' needs key 's'");
    spec.tau = require<double>(config, "tau", ctx);
    spec.T = require<double>(config, "T", ctx);
    spec.mass = parse_mass(config, ctx, MassMode::Lumped);
    const auto seed = get_or<std::uint64_t>(config, "seed", 12345);

    const QuadraticEnergy E = build_energy(spec);
    const Trajectory traj = run_mm(E, spec.tau, spec.T, spec.u0);
    const DissipationReport rep = dissipation_report(traj, E);

    OutputSink sink(opts.out_dir);
    sink.write("trajectory.csv", trajectory_csv(traj));

    std::vector<double> snap_times = get_or<std::vector<double>>(config, "snapshot_times", {0.0, spec.T});
    int snap_id = 0;
    for (double t : snap_times) {
        const GridFunction xt = traj.interpolate(std::min(t, traj.horizon()));
        const std::string name = "snapshot_" + std::to_string(snap_id++) + ".csv";
        xt.write_csv((opts.out_dir / name).string());
        sink.files.push_back(name);
    }

    Json summary;
    summary["family"] = flow_family_name(spec.family);
    summary["steps"] = traj.step_count() - 1;
    summary["energy_initial"] = traj.energies().front();
    summary["energy_final"] = traj.energies().back();
    summary["total_increment"] = rep.total_increment;
    summary["energy_drop"] = rep.energy_drop;
    summary["dissipation_bound_ok"] = rep.bound_ok;

    bool energies_monotone = true;
    for (std::size_t k = 1; k < traj.energies().size(); ++k) {
        if (traj.energies()[k] > traj.energies()[k - 1] + 1e-10 * (1.0 + std::abs(traj.energies()[k - 1])))
            energies_monotone = false;
    }
    summary["energies_nonincreasing"] = energies_monotone;

    bool step_self_adjoint = true;
    if (opts.check) {
        // <step(y1), y2>_M = <y1, step(y2)>_M on random pairs.
        Rng rng(seed);
        for (int rep_i = 0; rep_i < 5; ++rep_i) {
            Vec y1(grid->n()), y2(grid->n());
            for (double& x : y1) x = rng.sym();
            for (double& x : y2) x = rng.sym();
            const GridFunction s1 = E.prox(spec.tau, GridFunction(grid, y1));
            const GridFunction s2 = E.prox(spec.tau, GridFunction(grid, y2));
            const double lhs = E.inner(s1.coeffs(), y2);
            const double rhs = E.inner(y1, s2.coeffs());
            if (std::abs(lhs - rhs) > 1e-9 * (std::abs(lhs) + std::abs(rhs) + 1.0))
                step_self_adjoint = false;
        }
        summary["step_self_adjoint"] = step_self_adjoint;
    }

    sink.write("dissipation.json", summary.dump(2) + "\n");

    if (opts.svg) {
        SvgSeries es;
        es.label = "energy";
        for (std::size_t k = 0; k < traj.step_count(); ++k) {
            es.x.push_back(static_cast<double>(k) * traj.tau());
            es.y.push_back(traj.energies()[k]);
        }
        sink.write("energy.svg", render_svg_chart("energy along the flow", {es}, false));

        std::vector<SvgSeries> snaps;
        for (double t : snap_times) {
            SvgSeries ss;
            ss.label = "t=" + format17(t);
            const GridFunction xt = traj.interpolate(std::min(t, traj.horizon()));
            for (std::size_t i = 0; i < grid->n(); ++i) {
                ss.x.push_back(grid->node(i));
                ss.y.push_back(xt.coeffs()[i]);
            }
            snaps.push_back(std::move(ss));
        }
        sink.write("snapshots.svg", render_svg_chart("state snapshots", snaps, false));
    }

    sink.finish(config);
    std::cout << "flow " << flow_family_name(spec.family) << ": " << traj.step_count() - 1
              << " steps, energy " << format17(traj.energies().front()) << " -> "
              << format17(traj.energies().back()) << "\n";
    if (opts.check && !(rep.bound_ok && energies_monotone && step_self_adjoint)) {
        std::cerr << "flow check failed (dissipation bound / monotonicity / self-adjointness)\n";
        return 4;
    }
    return 0;
}

int cmd_sweep(const Json& config, const CliOptions& opts) {
    const std::string ctx = "sweep";
    check_keys(config, {"type", "domain", "n", "n0", "n_cap", "u0", "s_list", "mass", "seed"}, ctx);
    const auto type = require<std::string>(config, "type", ctx);
    const Domain domain = parse_domain(config, ctx);
    const auto s_list = parse_list(config, "s_list", ctx);
    const U0Spec u0 = parse_u0(config, ctx);

    SweepResult result;
    if (type == "order0" || type == "order1" || type == "ms_constant") {
        const auto n = require<std::size_t>(config, "n", ctx);
        GridPtr grid = make_grid(domain, n);
        const GridFunction u = u0.resolve(grid);
        if (type == "order0") result = gamma_sweep_order0(u, s_list);
        else if (type == "order1") result = gamma_sweep_order1(u, s_list);
        else result = ms_constant_estimate(u, s_list).sweep;
    } else if (type == "bbm") {
        const auto n0 = require<std::size_t>(config, "n0", ctx);
        const auto n_cap = get_or<std::size_t>(config, "n_cap", 2048);
        result = gamma_sweep_bbm(u0.field(domain), domain, n0, s_list, n_cap);
    } else {
        throw ConfigError(ctx + ": unknown sweep type '" + type + "'");
    }

    OutputSink sink(opts.out_dir);
    sink.write("sweep.csv", sweep_csv(result));
    sink.write("summary.json", sweep_summary(result).dump(2) + "\n");
    if (!result.rows.empty()) {
        SvgSeries series;
        series.label = result.columns.back();
        for (const auto& row : result.rows) {
            series.x.push_back(row.front());
            series.y.push_back(row.back());
        }
        maybe_svg(sink, opts, "sweep.svg", result.name, {series}, false);
    }
    std::cout << sweep_summary(result).dump(2) << "\n";
    return finish_checked(result, sink, config, opts);
}

int cmd_rate(const Json& config, const CliOptions& opts) {
    const std::string ctx = "rate";
    check_keys(config, {"family", "s", "domain", "n", "T", "u0", "mass", "tau_list", "seed"}, ctx);
    RateConfig rc;
    rc.family = flow_family_from_name(require<std::string>(config, "family", ctx));
    rc.s = get_or<double>(config, "s", 0.0);
    rc.domain = parse_domain(config, ctx);
    rc.n = require<std::size_t>(config, "n", ctx);
    rc.T = require<double>(config, "T", ctx);
    rc.mass = parse_mass(config, ctx, MassMode::Lumped);
    rc.tau_list = parse_list(config, "tau_list", ctx);
    rc.u0 = parse_u0(config, ctx).field(rc.domain);

    const SweepResult result = tau_rate(rc);

    OutputSink sink(opts.out_dir);
    sink.write("rate.csv", sweep_csv(result));
    Json summary = sweep_summary(result);
    summary["order"] = result.stat_value("order");
    sink.write("summary.json", summary.dump(2) + "\n");
    if (!result.rows.empty()) {
        SvgSeries series;
        series.label = "sup_err";
        for (const auto& row : result.rows) {
            series.x.push_back(row[0]);
            series.y.push_back(row[1]);
        }
        maybe_svg(sink, opts, "rate.svg", "error vs tau", {series}, true);
    }
    std::cout << summary.dump(2) << "\n";
    return finish_checked(result, sink, config, opts);
}

int cmd_stability(const Json& config, const CliOptions& opts) {
    const std::string ctx = "stability";
    check_keys(config,
               {"family", "limit_family", "s_list", "tau", "T", "domain", "n", "n0", "n_cap", "u0",
                "mass", "seed"},
               ctx);
    StabilityConfig sc;
    sc.family = flow_family_from_name(require<std::string>(config, "family", ctx));
    sc.limit_family = flow_family_from_name(require<std::string>(config, "limit_family", ctx));
    sc.s_list = parse_list(config, "s_list", ctx);
    sc.tau = require<double>(config, "tau", ctx);
    sc.T = require<double>(config, "T", ctx);
    sc.domain = parse_domain(config, ctx);
    sc.n = get_or<std::size_t>(config, "n", 0);
    sc.n0 = get_or<std::size_t>(config, "n0", 0);
    sc.n_cap = get_or<std::size_t>(config, "n_cap", 2048);
    sc.mass = parse_mass(config, ctx, MassMode::Lumped);
    sc.u0 = parse_u0(config, ctx).field(sc.domain);

    const SweepResult result = flow_stability(sc);

    OutputSink sink(opts.out_dir);
    sink.write("stability.csv", sweep_csv(result));
    sink.write("summary.json", sweep_summary(result).dump(2) + "\n");
    if (!result.rows.empty()) {
        SvgSeries series;
        series.label = "sup_err";
        for (const auto& row : result.rows) {
            series.x.push_back(row[0]);
            series.y.push_back(row[2]);
        }
        maybe_svg(sink, opts, "stability.svg", "trajectory gap vs s", {series}, true);
    }
    std::cout << sweep_summary(result).dump(2) << "\n";
    return finish_checked(result, sink, config, opts);
}

int cmd_report(const Json& config, const CliOptions& opts) {
    const std::string ctx = "report";
    check_keys(config, {"results_dir"}, ctx);
    const fs::path root = require<std::string>(config, "results_dir", ctx);
    if (!fs::exists(root)) throw ConfigError("report: results directory not found: " + root.string());

    struct RunEntry {
        std::string dir;
        bool integrity_ok = true;
        std::vector<std::pair<std::string, bool>> checks;
    };
    std::vector<RunEntry> runs;

    std::vector<fs::path> candidates{root};
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_directory()) candidates.push_back(e.path());
    std::sort(candidates.begin(), candidates.end());

    for (const auto& dir : candidates) {
        const fs::path manifest_path = dir / "manifest.json";
        if (!fs::exists(manifest_path)) continue;
        RunEntry entry;
        entry.dir = dir.string();
        const Json manifest = Json::parse(read_text_file(manifest_path));
        if (manifest.contains("files")) {
            for (auto it = manifest["files"].begin(); it != manifest["files"].end(); ++it) {
                const fs::path f = dir / it.key();
                if (!fs::exists(f) || content_hash(f) != it.value().get<std::string>())
                    entry.integrity_ok = false;
            }
        }
        const fs::path summary_path = dir / "summary.json";
        if (fs::exists(summary_path)) {
            const Json summary = Json::parse(read_text_file(summary_path));
            if (summary.contains("checks")) {
                for (auto it = summary["checks"].begin(); it != summary["checks"].end(); ++it)
                    entry.checks.emplace_back(it.key(), it.value().get<bool>());
            }
        }
        runs.push_back(std::move(entry));
    }
    if (runs.empty()) throw ConfigError("report: no manifests found under " + root.string());

    Json report;
    report["runs"] = Json::array();
    bool all_ok = true;
    std::ostringstream text;
    for (const auto& run : runs) {
        Json jr;
        jr["dir"] = run.dir;
        jr["integrity_ok"] = run.integrity_ok;
        Json checks = Json::object();
        bool run_ok = run.integrity_ok;
        for (const auto& [k, v] : run.checks) {
            checks[k] = v;
            run_ok = run_ok && v;
        }
        jr["checks"] = checks;
        jr["pass"] = run_ok;
        report["runs"].push_back(jr);
        all_ok = all_ok && run_ok;

        text << (run_ok ? "PASS " : "FAIL ") << run.dir;
        if (!run.integrity_ok) text << "  [integrity: file hash mismatch]";
        text << "\n";
        for (const auto& [k, v] : run.checks) text << "    " << (v ? "ok   " : "FAIL ") << k << "\n";
    }
    report["pass"] = all_ok;

    OutputSink sink(opts.out_dir);
    sink.write("report.json", report.dump(2) + "\n");
    sink.write("report.txt", text.str());
    sink.finish(config);
    std::cout << text.str();
    return opts.check && !all_ok ? 4 : 0;
}

int run_command(const std::string& command, const fs::path& config_path, const CliOptions& opts) {
    try {
        if (opts.jobs > 0) set_worker_count(opts.jobs);
        if (!fs::exists(config_path)) throw ConfigError("config file not found: " + config_path.string());
        Json config;
        try {
            config = Json::parse(read_text_file(config_path));
        } catch (const Json::exception& e) {
            throw ConfigError(std::string("config parse error: ") + e.what());
        }
        if (command == "energy") return cmd_energy(config, opts);
        if (command == "flow") return cmd_flow(config, opts);
        if (command == "sweep") return cmd_sweep(config, opts);
        if (command == "rate") return cmd_rate(config, opts);
        if (command == "stability") return cmd_stability(config, opts);
        if (command == "report") return cmd_report(config, opts);
        throw ConfigError("unknown command: " + command);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace fracflow
