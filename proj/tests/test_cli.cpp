#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "fracflow/cli.hpp"
#include "fracflow/flows.hpp"
#include "fracflow/util.hpp"

using namespace fracflow;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("fracflow_test_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

Json base_energy_config() {
    Json config;
    config["domain"] = {{"a", -1.0}, {"b", 1.0}};
    config["n"] = 64;
    config["u0"] = {{"family", "bump"}, {"params", Json::array()}};
    config["s_list"] = {0.25, 0.5};
    return config;
}

}  // namespace

TEST_CASE("energy command: identity in summary, zero input, exit codes") {
    TempDir tmp("energy");
    CliOptions opts;
    opts.out_dir = tmp.path / "run";

    Json config = base_energy_config();
    CHECK(cmd_energy(config, opts) == 0);
    CHECK(fs::exists(opts.out_dir / "energy.csv"));
    CHECK(fs::exists(opts.out_dir / "summary.json"));
    CHECK(fs::exists(opts.out_dir / "manifest.json"));

    const Json summary = Json::parse(read_text_file(opts.out_dir / "summary.json"));
    CHECK(summary["checks"]["renormalization_identity"].get<bool>());
    CHECK(summary["stats"]["worst_identity_residual"].get<double>() <= 1e-8);

    // Zero input: all table values vanish.
    Json zcfg = config;
    zcfg["u0"] = {{"family", "sine_mode"}, {"params", {1.0}}};
    // actually check the all-zero path through a csv of zeros
    auto g = make_grid({-1.0, 1.0}, 64);
    GridFunction zero(g);
    const auto zpath = (tmp.path / "zero.csv").string();
    zero.write_csv(zpath);
    zcfg["u0"] = {{"csv_path", zpath}};
    CliOptions zopts;
    zopts.out_dir = tmp.path / "zrun";
    CHECK(cmd_energy(zcfg, zopts) == 0);
    const std::string csv = read_text_file(zopts.out_dir / "energy.csv");
    CHECK(csv.find("inf") == std::string::npos);

    // Missing input file -> config error.
    Json bad = config;
    bad["u0"] = {{"csv_path", (tmp.path / "nope.csv").string()}};
    CliOptions bopts;
    bopts.out_dir = tmp.path / "bad";
    CHECK_THROWS_AS(cmd_energy(bad, bopts), ConfigError);

    // Unknown keys rejected.
    Json junk = config;
    junk["surprise"] = 1;
    CHECK_THROWS_AS(cmd_energy(junk, opts), ConfigError);
}

TEST_CASE("flow command: smoke run, snapshots, admissibility exit") {
    TempDir tmp("flow");
    Json config;
    config["family"] = "limit_ode";
    config["domain"] = {{"a", -1.0}, {"b", 1.0}};
    config["n"] = 32;
    config["tau"] = 0.05;
    config["T"] = 0.05;
    config["u0"] = {{"family", "bump"}, {"params", Json::array()}};

    CliOptions opts;
    opts.out_dir = tmp.path / "run";
    CHECK(cmd_flow(config, opts) == 0);
    CHECK(fs::exists(opts.out_dir / "trajectory.csv"));
    CHECK(fs::exists(opts.out_dir / "snapshot_0.csv"));
    CHECK(fs::exists(opts.out_dir / "dissipation.json"));
    const Json rep = Json::parse(read_text_file(opts.out_dir / "dissipation.json"));
    CHECK(rep["energy_final"].get<double>() <= rep["energy_initial"].get<double>());
    CHECK(rep["dissipation_bound_ok"].get<bool>());

    // tau outside the renormalized window: config error (exit 2 via dispatcher).
    Json bad = config;
    bad["family"] = "renormalized";
    bad["s"] = 0.25;
    bad["tau"] = 0.2;  // window is 1/(2*4) = 0.125
    CliOptions bopts;
    bopts.out_dir = tmp.path / "bad";
    CHECK_THROWS_WITH_AS(cmd_flow(bad, bopts), doctest::Contains("1/(2 lambda)"), ConfigError);
}

TEST_CASE("flow command: heat regression against the spectral fixture") {
    TempDir tmp("heat");
    const double T = 0.05;
    Json config;
    config["family"] = "limit_heat";
    config["domain"] = {{"a", 0.0}, {"b", 1.0}};
    config["n"] = 64;
    config["tau"] = 1e-4;
    config["T"] = T;
    config["u0"] = {{"family", "sine_mode"}, {"params", {1.0}}};
    config["snapshot_times"] = {T};

    CliOptions opts;
    opts.out_dir = tmp.path / "run";
    REQUIRE(cmd_flow(config, opts) == 0);

    auto g = make_grid({0.0, 1.0}, 64);
    const GridFunction got = GridFunction::read_csv(g, (opts.out_dir / "snapshot_0.csv").string());

    FlowSpec spec(sample(sine_mode_field(g->domain(), 1), g));
    spec.family = FlowFamily::LimitHeat;
    spec.T = T;
    const auto ref = exact_reference(spec, T);
    REQUIRE(ref.has_value());
    for (std::size_t i = 0; i < g->n(); ++i)
        CHECK(got.coeffs()[i] == doctest::Approx(ref->coeffs()[i]).epsilon(5e-3));
}

TEST_CASE("sweep command mirrors the lab run and rejects empty lists") {
    TempDir tmp("sweep");
    Json config;
    config["type"] = "order0";
    config["domain"] = {{"a", -1.0}, {"b", 1.0}};
    config["n"] = 128;
    config["u0"] = {{"family", "bump"}, {"params", Json::array()}};
    config["s_list"] = {0.08, 0.04, 0.02, 0.01};

    CliOptions opts;
    opts.out_dir = tmp.path / "run";
    opts.check = true;
    CHECK(cmd_sweep(config, opts) == 0);
    const Json summary = Json::parse(read_text_file(opts.out_dir / "summary.json"));
    CHECK(summary["checks"]["limit_within_2pct"].get<bool>());

    auto g = make_grid({-1.0, 1.0}, 128);
    const GridFunction u = sample(bump_field(g->domain()), g);
    const SweepResult direct = gamma_sweep_order0(u, {0.08, 0.04, 0.02, 0.01});
    CHECK(summary["stats"]["limit"].get<double>() == doctest::Approx(direct.stat_value("limit")).epsilon(1e-14));

    Json bad = config;
    bad["s_list"] = Json::array();
    CliOptions bopts;
    bopts.out_dir = tmp.path / "bad";
    CHECK_THROWS_AS(cmd_sweep(bad, bopts), ConfigError);
}

TEST_CASE("rate command reports the fitted order") {
    TempDir tmp("rate");
    Json config;
    config["family"] = "limit_ode";
    config["domain"] = {{"a", -1.0}, {"b", 1.0}};
    config["n"] = 32;
    config["T"] = 1.0;
    config["u0"] = {{"family", "bump"}, {"params", Json::array()}};
    config["tau_list"] = {2e-2, 1e-2, 5e-3};

    CliOptions opts;
    opts.out_dir = tmp.path / "run";
    opts.svg = true;
    CHECK(cmd_rate(config, opts) == 0);
    const Json summary = Json::parse(read_text_file(opts.out_dir / "summary.json"));
    const double order = summary["order"].get<double>();
    CHECK(order >= 0.9);
    CHECK(order <= 1.1);
    CHECK(fs::exists(opts.out_dir / "rate.svg"));
}

TEST_CASE("report command: aggregation, integrity, empty directory") {
    TempDir tmp("report");

    // Empty directory: config error (exit 2 at the dispatcher).
    {
        Json rcfg;
        rcfg["results_dir"] = (tmp.path / "results").string();
        fs::create_directories(tmp.path / "results");
        CliOptions ropts;
        ropts.out_dir = tmp.path / "rep0";
        CHECK_THROWS_AS(cmd_report(rcfg, ropts), ConfigError);
    }

    // One passing run.
    Json config;
    config["family"] = "limit_ode";
    config["domain"] = {{"a", -1.0}, {"b", 1.0}};
    config["n"] = 32;
    config["tau"] = 0.05;
    config["T"] = 0.05;
    config["u0"] = {{"family", "bump"}, {"params", Json::array()}};
    CliOptions fopts;
    fopts.out_dir = tmp.path / "results" / "flow_run";
    REQUIRE(cmd_flow(config, fopts) == 0);

    Json rcfg;
    rcfg["results_dir"] = (tmp.path / "results").string();
    CliOptions ropts;
    ropts.out_dir = tmp.path / "rep1";
    CHECK(cmd_report(rcfg, ropts) == 0);
    Json report = Json::parse(read_text_file(ropts.out_dir / "report.json"));
    CHECK(report["pass"].get<bool>());

    // Tamper with an output file: integrity failure flagged.
    {
        std::ofstream out(fopts.out_dir / "trajectory.csv", std::ios::app);
        out << "tampered\n";
    }
    CliOptions ropts2;
    ropts2.out_dir = tmp.path / "rep2";
    CHECK(cmd_report(rcfg, ropts2) == 0);
    report = Json::parse(read_text_file(ropts2.out_dir / "report.json"));
    CHECK(!report["pass"].get<bool>());
    bool flagged = false;
    for (const auto& run : report["runs"]) {
        if (!run["integrity_ok"].get<bool>()) flagged = true;
    }
    CHECK(flagged);

    // In check mode the failure becomes exit code 4.
    CliOptions ropts3;
    ropts3.out_dir = tmp.path / "rep3";
    ropts3.check = true;
    CHECK(cmd_report(rcfg, ropts3) == 4);
}

TEST_CASE("determinism: identical configs yield byte-identical outputs") {
    TempDir tmp("determinism");
    Json config = base_energy_config();
    config["seed"] = 999;

    CliOptions a, b;
    a.out_dir = tmp.path / "a";
    b.out_dir = tmp.path / "b";
    a.check = b.check = true;
    REQUIRE(cmd_energy(config, a) == 0);
    REQUIRE(cmd_energy(config, b) == 0);

    for (const char* name : {"energy.csv", "summary.json", "manifest.json"}) {
        CHECK(read_text_file(a.out_dir / name) == read_text_file(b.out_dir / name));
    }
}

TEST_CASE("dispatcher maps error classes to exit codes") {
    TempDir tmp("dispatch");
    // Unreadable config.
    CliOptions opts;
    opts.out_dir = tmp.path / "x";
    CHECK(run_command("energy", tmp.path / "missing.json", opts) == 2);

    // Malformed JSON.
    const fs::path badjson = tmp.path / "bad.json";
    write_text_file(badjson, "{ not json");
    CHECK(run_command("energy", badjson, opts) == 2);

    // Unknown command.
    const fs::path ok = tmp.path / "ok.json";
    write_text_file(ok, base_energy_config().dump());
    CHECK(run_command("frobnicate", ok, opts) == 2);

    // Happy path through the dispatcher.
    CHECK(run_command("energy", ok, opts) == 0);
}
