#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ancont/cli.hpp"
#include "ancont/config.hpp"
#include "ancont/errors.hpp"
#include "support.hpp"

using namespace ancont;
namespace ts = testsupport;
using nlohmann::json;

namespace {

struct CliRun {
    int exit_code = 0;
    std::string out;
    std::string err;
};

CliRun run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    CliRun r;
    r.exit_code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string write_temp(const std::string& name, const std::string& text) {
    const std::filesystem::path p = std::filesystem::temp_directory_path() / name;
    std::ofstream f(p, std::ios::binary);
    f << text;
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

const char* kAnnulusCfg = R"({
  "domain": {
    "label": "ring",
    "outer": {"type": "circle", "center": [0, 0], "radius": 2},
    "holes": [{"type": "circle", "radius": 1}]
  },
  "solver": {"samples": 48, "poly_degree": 4, "pole_degree": 6}
})";

}  // namespace

TEST_CASE("parse_config fills every section") {
    const RunConfig cfg = parse_config(R"({
      "domain": {
        "label": "ring",
        "outer": {"type": "circle", "center": [1, -2], "radius": 3},
        "holes": [{"type": "ellipse", "center": [1, -2], "semi_major": 1, "semi_minor": 0.5, "rotation": 0.25}]
      },
      "solver": {"poly_degree": 5, "pole_degree": 3, "samples": 128, "tolerance": 1e-6,
                 "max_iterations": 500, "lp_directions": 32},
      "covariance": {"a": [0, 1], "b": [3, -2]},
      "quantize": {"lambda": 0.5, "n_max": 4},
      "classify": {"tolerance": 0.01},
      "sweep": {"points": 12},
      "seed": 99
    })");
    REQUIRE(cfg.domain.has_value());
    CHECK(cfg.domain->label == "ring");
    const auto* outer = std::get_if<CircleSpec>(&cfg.domain->outer);
    REQUIRE(outer != nullptr);
    CHECK(outer->center == Complex{1.0, -2.0});
    CHECK(outer->radius == 3.0);
    REQUIRE(cfg.domain->holes.size() == 1);
    CHECK(std::holds_alternative<EllipseSpec>(cfg.domain->holes[0]));
    CHECK(cfg.solver.poly_degree == 5);
    CHECK(cfg.solver.pole_degree == 3);
    CHECK(cfg.solver.samples == 128);
    CHECK(cfg.solver.tolerance == 1e-6);
    CHECK(cfg.solver.max_iterations == 500);
    CHECK(cfg.solver.lp_directions == 32);
    REQUIRE(cfg.covariance.has_value());
    CHECK(cfg.covariance->a == Complex{0.0, 1.0});
    CHECK(cfg.covariance->b == Complex{3.0, -2.0});
    CHECK(cfg.quantize.lambda == 0.5);
    CHECK(cfg.quantize.n_max == 4);
    CHECK(cfg.classify_tolerance == 0.01);
    CHECK(cfg.sweep_points == 12);
    CHECK(cfg.seed == 99);
}

TEST_CASE("parse_config defaults when sections are absent") {
    const RunConfig cfg = parse_config("{}");
    CHECK(!cfg.domain.has_value());
    CHECK(!cfg.covariance.has_value());
    CHECK(cfg.solver.poly_degree == 8);
    CHECK(cfg.solver.samples == 256);
    CHECK(cfg.quantize.n_max == 10);
    CHECK(cfg.seed == 0);
}

TEST_CASE("parse_config rejects malformed and off-schema input") {
    // field path in the message makes the rejection actionable
    const auto message_of = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("(no error)");
    };

    CHECK(message_of("[1, 2]") == "config root must be a JSON object");
    CHECK(message_of("{\"bogus\": 1}").find("\"bogus\"") != std::string::npos);
    CHECK(message_of("{\"solver\": {\"smaples\": 64}}").find("solver.smaples") != std::string::npos);
    CHECK(message_of("{\"domain\": {\"outer\": {\"type\": \"circle\", \"radius\": 1, \"r\": 2}}}")
              .find("domain.outer.r") != std::string::npos);
    CHECK(message_of("{\"domain\": {\"outer\": 3}}").find("expected an object") != std::string::npos);
    // syntax error reports position, not a field
    CHECK(message_of("{\"seed\": }").find("line") != std::string::npos);

    CHECK_THROWS_AS(parse_config("{\"domain\": {\"outer\": {\"type\": \"blob\", \"radius\": 1}}}"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config("{\"domain\": {\"holes\": []}}"), ConfigError);  // outer missing
    CHECK_THROWS_AS(parse_config("{\"domain\": {\"outer\": {\"type\": \"circle\"}}}"), ConfigError);
    CHECK_THROWS_AS(
        parse_config("{\"domain\": {\"outer\": {\"type\": \"circle\", \"radius\": [1]}}}"),
        ConfigError);
    CHECK_THROWS_AS(
        parse_config(
            "{\"domain\": {\"outer\": {\"type\": \"circle\", \"center\": [0], \"radius\": 1}}}"),
        ConfigError);
    CHECK_THROWS_AS(
        parse_config("{\"domain\": {\"outer\": {\"type\": \"polygon\", \"vertices\": [[0,0],[1,0]]}}}"),
        ConfigError);
    CHECK_THROWS_AS(parse_config("{\"domain\": {\"outer\": {\"type\": \"fourier\", "
                                 "\"coefficients\": [[0, [1, 0]]]}}}"),
                    ConfigError);

    // caps
    CHECK_THROWS_AS(parse_config("{\"solver\": {\"samples\": 8}}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"solver\": {\"samples\": 100000}}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"solver\": {\"poly_degree\": 65}}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"solver\": {\"tolerance\": 0}}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"solver\": {\"tolerance\": 1}}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"solver\": {\"max_iterations\": 0}}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"solver\": {\"lp_directions\": 4}}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"solver\": {\"samples\": 64.5}}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"quantize\": {\"n_max\": 0}}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"sweep\": {\"points\": 1}}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"seed\": -1}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"covariance\": {\"a\": [0, 0]}}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"covariance\": {\"b\": [1, 0]}}"), ConfigError);  // a missing
}

TEST_CASE("config_echo is a canonical fixpoint") {
    const RunConfig first = parse_config(kAnnulusCfg);
    const std::string once = config_echo(first).dump(2);
    const RunConfig second = parse_config(once);
    const std::string twice = config_echo(second).dump(2);
    CHECK(once == twice);
}

TEST_CASE("cli: content solves the annulus and certifies it") {
    const std::string cfg = write_temp("cli_annulus.json", kAnnulusCfg);
    const CliRun r = run({"content", cfg});
    REQUIRE(r.exit_code == 0);
    CHECK(r.err.empty());
    const json rep = json::parse(r.out);
    CHECK(rep["schema_version"] == 1);
    CHECK(rep["command"] == "content");
    CHECK(rep["config"]["domain"]["label"] == "ring");
    const json& res = rep["results"];
    CHECK(res["converged"] == true);
    CHECK(res["lambda_hat"].get<double>() == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(res["lower_bound"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(res["certificate"]["sandwich_ok"] == true);
    CHECK(res["certificate"]["lambda_lp"].get<double>() >=
          res["lambda_train"].get<double>() - 1e-6);
    // the residual cannot peak strictly inside the domain
    CHECK(res["interior_max"].get<double>() <= res["lambda_hat"].get<double>() + 1e-9);

    // the pole coefficient dominates and matches R1*R2
    double best = 0.0;
    int best_exp = 0;
    for (const json& c : res["coefficients"]) {
        const double mag = std::hypot(c["unscaled"][0].get<double>(), c["unscaled"][1].get<double>());
        if (mag > best) {
            best = mag;
            best_exp = c["exponent"].get<int>();
        }
    }
    CHECK(best_exp == -1);
    CHECK(best == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("cli: reports are byte-identical apart from timings") {
    const std::string cfg = write_temp("cli_det.json", kAnnulusCfg);
    const CliRun a = run({"content", cfg, "--seed", "42"});
    const CliRun b = run({"content", cfg, "--seed", "42"});
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    json ja = json::parse(a.out);
    json jb = json::parse(b.out);
    CHECK(ja.contains("timings"));
    ja.erase("timings");
    jb.erase("timings");
    CHECK(ja.dump() == jb.dump());
}

TEST_CASE("cli: csv series has one row per training sample") {
    const std::string cfg = write_temp("cli_csv.json", kAnnulusCfg);
    const std::string csv_path =
        (std::filesystem::temp_directory_path() / "cli_res.csv").string();
    const CliRun r = run({"content", cfg, "--csv", csv_path});
    REQUIRE(r.exit_code == 0);
    const json training = json::parse(r.out)["results"]["training"];
    CHECK(training["total_points"].get<int>() ==
          training["points_per_component"].get<int>() * training["components"].get<int>());
    std::istringstream rows(slurp(csv_path));
    std::string line;
    REQUIRE(std::getline(rows, line));
    CHECK(line == "theta,component,abs_residual");
    int count = 0;
    double peak = 0.0;
    while (std::getline(rows, line)) {
        ++count;
        const auto c1 = line.find(','), c2 = line.rfind(',');
        REQUIRE(c1 != std::string::npos);
        REQUIRE(c2 > c1);
        peak = std::max(peak, std::stod(line.substr(c2 + 1)));
    }
    CHECK(count == training["total_points"].get<int>());
    CHECK(peak == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("cli: quantize enumerates the family from flags alone") {
    const std::string csv_path = (std::filesystem::temp_directory_path() / "cli_q.csv").string();
    const CliRun r = run({"quantize", "--lambda", "1", "--n-max", "3", "--csv", csv_path});
    REQUIRE(r.exit_code == 0);
    const json rep = json::parse(r.out);
    const json& rows = rep["results"]["rows"];
    REQUIRE(rows.size() == 3);
    const double pi = std::numbers::pi;
    CHECK(rows[0]["r1"] == 1.0);
    CHECK(rows[0]["r2"] == 0.0);
    CHECK(rows[0]["area"].get<double>() == doctest::Approx(pi).epsilon(1e-14));
    CHECK(rows[1]["r1"] == 2.0);
    CHECK(rows[1]["r2"] == 1.0);
    CHECK(rows[1]["area"].get<double>() == doctest::Approx(3 * pi).epsilon(1e-14));
    CHECK(rows[2]["r1"] == 3.0);
    CHECK(rows[2]["r2"] == 2.0);
    CHECK(rows[2]["area"].get<double>() == doctest::Approx(5 * pi).epsilon(1e-14));
    std::istringstream csv(slurp(csv_path));
    std::string line;
    int lines = 0;
    while (std::getline(csv, line)) ++lines;
    CHECK(lines == 4);
}

TEST_CASE("cli: bounds matches the perimeter oracle on the ellipse") {
    const std::string cfg = write_temp(
        "cli_ellipse.json",
        R"({"domain": {"outer": {"type": "ellipse", "semi_major": 2, "semi_minor": 1}}})");
    const CliRun r = run({"bounds", cfg});
    REQUIRE(r.exit_code == 0);
    const json res = json::parse(r.out)["results"];
    const double lower_oracle = 4.0 * std::numbers::pi / ts::ellipse_perimeter_oracle(2.0, 1.0);
    CHECK(res["lower_bound"].get<double>() == doctest::Approx(lower_oracle).epsilon(1e-9));
    CHECK(res["upper_bound"].get<double>() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(res["connectivity"] == 1);
}

TEST_CASE("cli: classify flags the annulus as extremal") {
    const std::string cfg = write_temp("cli_classify.json", kAnnulusCfg);
    const CliRun r = run({"classify", cfg});
    REQUIRE(r.exit_code == 0);
    const json res = json::parse(r.out)["results"];
    CHECK(res["classification"]["is_extremal"] == true);
    CHECK(res["classification"]["gap"].get<double>() <= 1e-6);
}

TEST_CASE("cli: covariance reproduces the scaling law") {
    const std::string cfg = write_temp("cli_cov.json", R"({
      "domain": {"outer": {"type": "circle", "radius": 2},
                 "holes": [{"type": "circle", "radius": 1}]},
      "solver": {"samples": 48, "poly_degree": 4, "pole_degree": 6},
      "covariance": {"a": [1, 1], "b": [0, 3]}
    })");
    const CliRun r = run({"covariance", cfg});
    REQUIRE(r.exit_code == 0);
    const json res = json::parse(r.out)["results"];
    CHECK(res["lambda_ratio"].get<double>() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
    CHECK(res["ratio_error"].get<double>() <= 2e-3);
    CHECK(res["law_deviation"].get<double>() <= 5e-3);
}

TEST_CASE("cli: verify-connection passes on the quantized annulus") {
    const std::string cfg = write_temp("cli_vc.json", kAnnulusCfg);
    const CliRun r = run({"verify-connection", cfg});
    REQUIRE(r.exit_code == 0);
    const json res = json::parse(r.out)["results"];
    CHECK(res["pass"] == true);
    CHECK(res["quantized"] == true);
    CHECK(res["potential"] == "2/z");
    CHECK(res["ode_residual_v1"].get<double>() <= 1e-12);
    CHECK(res["ode_residual_v2"].get<double>() <= 1e-12);
    CHECK(res["derivative_identity"]["constant"][0].get<double>() ==
          doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(res["boundary_limits"]["v1_deviation"].get<double>() <= 1e-12);
}

TEST_CASE("cli: sweep tabulates lambda across hole radii") {
    const std::string cfg = write_temp("cli_sweep.json", R"({
      "domain": {"outer": {"type": "circle", "radius": 2}},
      "solver": {"samples": 48, "poly_degree": 4, "pole_degree": 6},
      "sweep": {"points": 4}
    })");
    const CliRun r = run({"sweep", cfg});
    REQUIRE(r.exit_code == 0);
    const json rows = json::parse(r.out)["results"]["rows"];
    REQUIRE(rows.size() == 4);
    for (const json& row : rows) {
        const double r2 = row["r2"].get<double>();
        CHECK(row["lambda_hat"].get<double>() == doctest::Approx(2.0 - r2).epsilon(1e-3));
        CHECK(row["converged"] == true);
    }
}

TEST_CASE("cli: --out routes the report to a file") {
    const std::string cfg = write_temp("cli_out.json", kAnnulusCfg);
    const std::string out_path = (std::filesystem::temp_directory_path() / "cli_rep.json").string();
    const CliRun r = run({"bounds", cfg, "--out", out_path});
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.empty());
    const json rep = json::parse(slurp(out_path));
    CHECK(rep["command"] == "bounds");
}

TEST_CASE("cli: overrides land in the config echo") {
    const std::string cfg = write_temp("cli_over.json", kAnnulusCfg);
    const CliRun r = run({"bounds", cfg, "--samples", "32", "--degree", "5", "--seed", "7"});
    REQUIRE(r.exit_code == 0);
    const json rep = json::parse(r.out);
    CHECK(rep["config"]["solver"]["samples"] == 32);
    CHECK(rep["config"]["solver"]["poly_degree"] == 5);
    CHECK(rep["config"]["solver"]["pole_degree"] == 5);
    CHECK(rep["seed"] == 7);
}

TEST_CASE("cli: exit codes separate config errors from solver failures") {
    CHECK(run({"content", "/nonexistent/nowhere.json"}).exit_code == 2);
    CHECK(run({"frobnicate"}).exit_code == 2);
    CHECK(run({}).exit_code == 2);
    CHECK(run({"--help"}).exit_code == 0);

    const std::string bad = write_temp("cli_bad.json", R"({"solvr": {}})");
    CHECK(run({"content", bad}).exit_code == 2);

    const std::string cfg = write_temp("cli_codes.json", kAnnulusCfg);
    CHECK(run({"bounds", cfg, "--csv", "/tmp/cli_never.csv"}).exit_code == 2);
    CHECK(run({"covariance", cfg}).exit_code == 2);  // section missing
    CHECK(run({"content", cfg, "--samples", "8"}).exit_code == 2);
    CHECK(run({"content", cfg, "--tolerance", "2"}).exit_code == 2);
    CHECK(run({"content"}).exit_code == 2);  // no config at all

    // a solve that cannot converge in one iteration reports, then exits 3
    const std::string stuck = write_temp("cli_stuck.json", R"({
      "domain": {"outer": {"type": "ellipse", "semi_major": 2, "semi_minor": 1}},
      "solver": {"samples": 16, "poly_degree": 2, "max_iterations": 1}
    })");
    const CliRun r = run({"content", stuck});
    CHECK(r.exit_code == 3);
    const json res = json::parse(r.out)["results"];
    CHECK(res["converged"] == false);
    CHECK(res["certificate"].is_null());
}

TEST_CASE("cli: sweep and verify-connection insist on concentric circles") {
    const std::string ell = write_temp(
        "cli_shape.json",
        R"({"domain": {"outer": {"type": "ellipse", "semi_major": 2, "semi_minor": 1}}})");
    CHECK(run({"verify-connection", ell}).exit_code == 2);
    CHECK(run({"sweep", ell}).exit_code == 2);

    const std::string ring = write_temp("cli_shape2.json", kAnnulusCfg);
    CHECK(run({"sweep", ring}).exit_code == 2);  // sweep wants a disk to start from
}
