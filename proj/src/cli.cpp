#include "ancont/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ancont/config.hpp"
#include "ancont/connection.hpp"
#include "ancont/errors.hpp"
#include "ancont/extremal.hpp"
#include "ancont/geometry.hpp"
#include "ancont/minimax.hpp"

namespace ancont {
namespace {

using nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

ordered_json cplx(Complex z) { return ordered_json::array({z.real(), z.imag()}); }

// %.17g round-trips doubles exactly, so CSV rows are reproducible bytes.
std::string csv_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ContentOptions make_content_options(const SolverConfig& s) {
    ContentOptions o;
    o.samples = s.samples;
    o.poly_degree = s.poly_degree;
    o.pole_degree = s.pole_degree;
    o.max_samples = std::max(o.max_samples, s.samples);
    o.max_degree = std::max({o.max_degree, s.poly_degree, s.pole_degree});
    o.lawson.max_iterations = s.max_iterations;
    o.lawson.tolerance = s.tolerance;
    return o;
}

const DomainSpec& require_domain(const RunConfig& cfg, const std::string& command) {
    if (!cfg.domain)
        throw ConfigError(command + " needs a config file with a \"domain\" section");
    return *cfg.domain;
}

struct AnnulusShape {
    double r1 = 0.0;
    double r2 = 0.0;  // 0 for a disk
};

// The radial-family commands need literal concentric circles about the
// origin; anything else has no closed-form connection to check against.
AnnulusShape concentric_shape(const DomainSpec& domain, const std::string& command) {
    const std::string want =
        command + " expects a circle about the origin with at most one concentric circular hole";
    const auto* outer = std::get_if<CircleSpec>(&domain.outer);
    if (!outer || std::abs(outer->center) > 1e-12 * outer->radius) throw ConfigError(want);
    AnnulusShape shape{outer->radius, 0.0};
    if (domain.holes.size() > 1) throw ConfigError(want);
    if (domain.holes.size() == 1) {
        const auto* hole = std::get_if<CircleSpec>(&domain.holes.front());
        if (!hole || std::abs(hole->center) > 1e-12 * outer->radius) throw ConfigError(want);
        shape.r2 = hole->radius;
    }
    return shape;
}

ordered_json residual_stats(const MinimaxResult& r) {
    double sum = 0.0;
    double peak = 0.0;
    for (const Complex e : r.residuals) {
        sum += std::abs(e);
        peak = std::max(peak, std::abs(e));
    }
    ordered_json j;
    j["max"] = peak;
    j["mean"] = r.residuals.empty() ? 0.0 : sum / static_cast<double>(r.residuals.size());
    j["equioscillation_ratio"] = r.equioscillation_ratio;
    j["verification_points"] = r.residuals.size();
    return j;
}

ordered_json coefficients_json(const MinimaxResult& r) {
    ordered_json arr = ordered_json::array();
    for (std::size_t j = 0; j < r.basis.size(); ++j) {
        ordered_json e;
        e["exponent"] = r.basis[j].exponent;
        e["center"] = cplx(r.basis[j].center);
        e["scale"] = r.basis[j].scale;
        e["value"] = cplx(r.coefficients[j]);
        e["unscaled"] = cplx(unscaled_coefficient(r.basis[j], r.coefficients[j]));
        arr.push_back(std::move(e));
    }
    return arr;
}

ordered_json ladder_json(const MinimaxResult& r) {
    ordered_json arr = ordered_json::array();
    for (const RefinementStep& s : r.ladder)
        arr.push_back({{"samples_per_component", s.samples_per_component},
                       {"poly_degree", s.poly_degree},
                       {"pole_degree", s.pole_degree},
                       {"lambda_hat", s.lambda_hat},
                       {"lower_bound", s.lower_bound},
                       {"iterations", s.iterations},
                       {"converged", s.converged}});
    return arr;
}

struct CommandOutput {
    ordered_json results;
    std::string csv;  // empty when the command has no plottable series
    int exit_code = 0;
};

struct SolveOutput {
    MinimaxResult result;
    ordered_json json;
    std::string csv;
};

SolveOutput run_content(const DomainSpec& domain, const RunConfig& cfg) {
    SolveOutput sol;
    sol.result = analytic_content(domain, make_content_options(cfg.solver));
    const MinimaxResult& r = sol.result;
    const auto [lo, hi] = bounds(domain);

    const std::vector<Complex> train_res = residual_field(r, r.basis, r.samples.points);
    double lambda_train = 0.0;
    for (const Complex e : train_res) lambda_train = std::max(lambda_train, std::abs(e));

    // Maximum-principle diagnostic: the residual cannot peak strictly inside.
    const std::vector<Complex> inner = interior_points(domain, 64, cfg.seed);
    double interior_max = 0.0;
    for (const Complex e : residual_field(r, r.basis, inner))
        interior_max = std::max(interior_max, std::abs(e));

    ordered_json j;
    j["lambda_hat"] = r.lambda_hat;
    j["lower_bound"] = lo;
    j["upper_bound"] = hi;
    j["gap"] = r.lambda_hat - lo;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["condition_estimate"] = r.condition_estimate;
    j["training"] = {{"points_per_component", r.samples.points_per_component},
                     {"components", r.samples.component_count},
                     {"total_points", r.samples.points.size()}};
    j["residuals"] = residual_stats(r);
    j["lambda_train"] = lambda_train;
    j["interior_max"] = interior_max;
    // The LP certificate only means something for a converged minimizer, and
    // it is the expensive half of the report; unconverged runs keep their
    // diagnostics instead.
    if (r.converged) {
        const LpResult lp = lp_crosscheck(r.samples, r.basis, cfg.solver.lp_directions);
        j["certificate"] = {
            {"directions", cfg.solver.lp_directions},
            {"lambda_lp", lp.lambda_lp},
            {"lp_raw", lp.t_raw},
            {"sandwich_ok", lo <= r.lambda_hat + 1e-9 &&
                                lambda_train <= lp.lambda_lp + 1e-6 * (1.0 + lp.lambda_lp)}};
    } else {
        j["certificate"] = nullptr;
    }
    j["coefficients"] = coefficients_json(r);
    j["ladder"] = ladder_json(r);
    sol.json = std::move(j);

    std::string csv = "theta,component,abs_residual\n";
    for (std::size_t i = 0; i < r.samples.points.size(); ++i)
        csv += csv_num(r.samples.params[i]) + "," + std::to_string(r.samples.component[i]) + "," +
               csv_num(std::abs(train_res[i])) + "\n";
    sol.csv = std::move(csv);
    return sol;
}

CommandOutput cmd_content(const RunConfig& cfg) {
    const DomainSpec& domain = require_domain(cfg, "content");
    SolveOutput sol = run_content(domain, cfg);
    return {std::move(sol.json), std::move(sol.csv), sol.result.converged ? 0 : 3};
}

CommandOutput cmd_bounds(const RunConfig& cfg) {
    const DomainSpec& domain = require_domain(cfg, "bounds");
    validate(domain);
    const auto [lo, hi] = bounds(domain);
    ordered_json j;
    j["area"] = area(domain);
    j["perimeter"] = perimeter(domain);
    j["connectivity"] = connectivity(domain);
    j["lower_bound"] = lo;
    j["upper_bound"] = hi;
    j["isoperimetric_ratio"] = lo / hi;
    return {std::move(j), {}, 0};
}

CommandOutput cmd_classify(const RunConfig& cfg) {
    const DomainSpec& domain = require_domain(cfg, "classify");
    SolveOutput sol = run_content(domain, cfg);
    ordered_json j = std::move(sol.json);
    if (sol.result.converged) {
        const BoundsReport rep = classify(domain, sol.result, cfg.classify_tolerance);
        j["classification"] = {{"is_extremal", rep.is_extremal},
                               {"gap", rep.gap},
                               {"tolerance", rep.tolerance}};
    }
    return {std::move(j), std::move(sol.csv), sol.result.converged ? 0 : 3};
}

CommandOutput cmd_covariance(const RunConfig& cfg) {
    const DomainSpec& domain = require_domain(cfg, "covariance");
    if (!cfg.covariance)
        throw ConfigError("covariance needs a \"covariance\" section with the map coefficients");
    const CovarianceParams& cv = *cfg.covariance;
    const CovarianceReport rep = covariance_check(domain, cv.a, cv.b, make_content_options(cfg.solver));
    ordered_json j;
    j["a"] = cplx(cv.a);
    j["b"] = cplx(cv.b);
    j["lambda_base"] = rep.lambda_base;
    j["lambda_transformed"] = rep.lambda_transformed;
    j["lambda_ratio"] = rep.lambda_ratio;
    j["expected_ratio"] = std::abs(cv.a);
    j["ratio_error"] = std::abs(rep.lambda_ratio - std::abs(cv.a));
    j["law_deviation"] = rep.coeff_transform_error;
    j["converged"] = rep.converged;
    return {std::move(j), {}, rep.converged ? 0 : 3};
}

CommandOutput cmd_verify_connection(const RunConfig& cfg) {
    const DomainSpec& domain = require_domain(cfg, "verify-connection");
    validate(domain);
    const auto [r1, r2] = concentric_shape(domain, "verify-connection");
    const int count = cfg.solver.samples;

    const ProjectiveConnection conn = annulus_connection(r1, r2);
    const ChiralField f1 = chiral_field(ChiralKind::v1, r1, r2);
    const ChiralField f2 = chiral_field(ChiralKind::v2, r1, r2);
    const double mid = r2 > 0.0 ? std::sqrt(r1 * r2) : 0.5 * r1;
    const std::vector<Complex> grid = circle_points(mid, count);

    ordered_json j;
    j["r1"] = r1;
    j["r2"] = r2;
    j["lambda"] = conn.lambda;
    j["potential"] = conn.potential_label;
    j["grid_points"] = count;

    const double ode1 = ode_residual(conn, f1, grid);
    const double ode2 = ode_residual(conn, f2, grid);
    j["ode_residual_v1"] = ode1;
    j["ode_residual_v2"] = ode2;

    const double mod1 = modulus_deviation(f1, circle_points(r1, count));
    const double mod2 = r2 > 0.0 ? modulus_deviation(f2, circle_points(r2, count)) : 0.0;
    j["boundary_modulus_v1"] = mod1;
    if (r2 > 0.0) j["boundary_modulus_v2"] = mod2;

    j["monodromy_defect_v1"] = monodromy_defect(r1, conn.lambda);
    if (r2 > 0.0) j["monodromy_defect_v2"] = monodromy_defect(r2, conn.lambda);

    // Integration vs closed form along radial paths, outward for v1 and
    // inward for v2; eight nodes is plenty for a smooth radial run.
    const auto integrate_field = [&](const ChiralField& f, double target) {
        std::vector<Complex> path;
        for (int i = 1; i <= 8; ++i) path.emplace_back(mid + (target - mid) * i / 8.0, 0.0);
        const std::vector<Complex> got =
            ode_integrate(conn, Complex(mid, 0.0), field_value(f, Complex(mid, 0.0)),
                          field_derivative(f, Complex(mid, 0.0)), path);
        double worst = 0.0;
        for (std::size_t i = 0; i < path.size(); ++i) {
            const Complex expect = field_value(f, path[i]);
            worst = std::max(worst, std::abs(got[i] - expect) / std::abs(expect));
        }
        return worst;
    };
    const double int1 = integrate_field(f1, r1);
    const double int2 = r2 > 0.0 ? integrate_field(f2, r2) : 0.0;
    j["integration_error_v1"] = int1;
    if (r2 > 0.0) j["integration_error_v2"] = int2;

    double ident_dev = 0.0;
    if (r2 > 0.0) {
        const DerivativeIdentityReport id = derivative_identity_check(r1, r2, grid);
        ident_dev = std::max(id.deviation, id.symmetric_deviation);
        j["derivative_identity"] = {{"constant", cplx(id.constant)},
                                    {"deviation", id.deviation},
                                    {"symmetric_constant", cplx(id.symmetric_constant)},
                                    {"symmetric_deviation", id.symmetric_deviation}};
    }

    const double ratio = r1 / conn.lambda;
    const bool quantized = std::abs(ratio - std::round(ratio)) <= 1e-9;
    j["quantized"] = quantized;
    double limit_dev = 0.0;
    if (quantized) {
        const int n = static_cast<int>(std::lround(ratio));
        const QuantizedAnnulus q{n, conn.lambda, r1, r2,
                                 (2.0 * n - 1.0) * std::numbers::pi * conn.lambda * conn.lambda};
        const BoundaryLimitReport lim = boundary_limit_check(q, count);
        limit_dev = std::max(lim.v1_deviation, lim.v2_deviation);
        j["boundary_limits"] = {{"v1_deviation", lim.v1_deviation},
                                {"v2_deviation", lim.v2_deviation}};
    }

    const bool pass = std::max({ode1, ode2, mod1, mod2, ident_dev, limit_dev}) <= 1e-10 &&
                      std::max(int1, int2) <= 1e-8;
    j["pass"] = pass;
    return {std::move(j), {}, pass ? 0 : 3};
}

CommandOutput cmd_quantize(const RunConfig& cfg) {
    const std::vector<QuantizedAnnulus> family =
        enumerate_quantized(cfg.quantize.lambda, cfg.quantize.n_max);
    ordered_json rows = ordered_json::array();
    std::string csv = "n,r1,r2,area\n";
    for (const QuantizedAnnulus& q : family) {
        rows.push_back({{"n", q.n}, {"r1", q.r1}, {"r2", q.r2}, {"area", q.area}});
        csv += std::to_string(q.n) + "," + csv_num(q.r1) + "," + csv_num(q.r2) + "," +
               csv_num(q.area) + "\n";
    }
    ordered_json j;
    j["lambda"] = cfg.quantize.lambda;
    j["n_max"] = cfg.quantize.n_max;
    j["rows"] = std::move(rows);
    return {std::move(j), std::move(csv), 0};
}

CommandOutput cmd_sweep(const RunConfig& cfg) {
    const DomainSpec& domain = require_domain(cfg, "sweep");
    validate(domain);
    const auto [r1, r2] = concentric_shape(domain, "sweep");
    if (r2 > 0.0)
        throw ConfigError("sweep varies the hole radius itself; start from a disk (no holes)");

    const ContentOptions opts = make_content_options(cfg.solver);
    ordered_json rows = ordered_json::array();
    std::string csv = "r2,lambda_hat,lower,upper,gap,converged\n";
    bool all_converged = true;
    for (int i = 0; i < cfg.sweep_points; ++i) {
        const double hole = r1 * i / cfg.sweep_points;
        DomainSpec d;
        d.outer = CircleSpec{{0.0, 0.0}, r1};
        if (hole > 0.0) d.holes.push_back(CircleSpec{{0.0, 0.0}, hole});
        const MinimaxResult r = analytic_content(d, opts);
        const auto [lo, hi] = bounds(d);
        all_converged = all_converged && r.converged;
        rows.push_back({{"r2", hole},
                        {"lambda_hat", r.lambda_hat},
                        {"lower", lo},
                        {"upper", hi},
                        {"gap", r.lambda_hat - lo},
                        {"converged", r.converged}});
        csv += csv_num(hole) + "," + csv_num(r.lambda_hat) + "," + csv_num(lo) + "," +
               csv_num(hi) + "," + csv_num(r.lambda_hat - lo) + "," +
               (r.converged ? "1" : "0") + "\n";
    }
    ordered_json j;
    j["r1"] = r1;
    j["points"] = cfg.sweep_points;
    j["rows"] = std::move(rows);
    return {std::move(j), std::move(csv), all_converged ? 0 : 3};
}

CommandOutput dispatch(const std::string& command, const RunConfig& cfg) {
    if (command == "content") return cmd_content(cfg);
    if (command == "bounds") return cmd_bounds(cfg);
    if (command == "classify") return cmd_classify(cfg);
    if (command == "covariance") return cmd_covariance(cfg);
    if (command == "verify-connection") return cmd_verify_connection(cfg);
    if (command == "quantize") return cmd_quantize(cfg);
    return cmd_sweep(cfg);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"analytic content of planar domains: solver, bounds, and connection checks"};
    app.name("ancont");
    app.require_subcommand(1);

    std::string config_path, out_path, csv_path;
    std::uint64_t seed = 0;
    int samples = 0;
    int degree = 0;
    int n_max = 0;
    double tolerance = 0.0;
    double lambda = 0.0;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"content", "solve for the analytic content of the configured domain"},
        {"bounds", "report the isoperimetric bounds without solving"},
        {"classify", "solve, then test the domain for extremality"},
        {"covariance", "check the scaling law under an affine map"},
        {"verify-connection", "check the closed-form fields of a circular domain"},
        {"quantize", "enumerate the single-valued annulus family"},
        {"sweep", "solve across a grid of hole radii and tabulate"},
    };
    for (const auto& [name, blurb] : commands) {
        CLI::App* sub = app.add_subcommand(name, blurb);
        sub->add_option("config", config_path, "JSON configuration file");
        sub->add_option("--out", out_path, "write the JSON report to this file instead of stdout");
        sub->add_option("--csv", csv_path, "write the plottable series to this file as CSV");
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--samples", samples, "override solver.samples");
        sub->add_option("--degree", degree, "override both solver degrees");
        sub->add_option("--tolerance", tolerance,
                        "override solver.tolerance (for classify: the gap threshold)");
        if (name == "quantize") {
            sub->add_option("--lambda", lambda, "content value of the family");
            sub->add_option("--n-max", n_max, "largest level to enumerate");
        }
    }

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();

    try {
        RunConfig cfg = sub->count("config") ? load_config(config_path) : RunConfig{};
        if (sub->count("--seed")) cfg.seed = seed;
        if (sub->count("--samples")) {
            if (samples < 16 || samples > 4096) throw ConfigError("--samples must lie in 16..4096");
            cfg.solver.samples = samples;
        }
        if (sub->count("--degree")) {
            if (degree < 0 || degree > 64) throw ConfigError("--degree must lie in 0..64");
            cfg.solver.poly_degree = degree;
            cfg.solver.pole_degree = degree;
        }
        if (sub->count("--tolerance")) {
            if (!(tolerance > 0.0 && tolerance < 1.0))
                throw ConfigError("--tolerance must lie strictly between 0 and 1");
            if (command == "classify")
                cfg.classify_tolerance = tolerance;
            else
                cfg.solver.tolerance = tolerance;
        }
        if (command == "quantize") {
            if (sub->count("--lambda")) {
                if (!(lambda > 0.0 && lambda < 1e6))
                    throw ConfigError("--lambda must lie strictly between 0 and 1e6");
                cfg.quantize.lambda = lambda;
            }
            if (sub->count("--n-max")) {
                if (n_max < 1 || n_max > 64) throw ConfigError("--n-max must lie in 1..64");
                cfg.quantize.n_max = n_max;
            }
        }

        const bool csv_available = command == "content" || command == "classify" ||
                                   command == "quantize" || command == "sweep";
        if (sub->count("--csv") && !csv_available)
            throw ConfigError("--csv is not available for " + command);

        const auto t0 = std::chrono::steady_clock::now();
        CommandOutput result = dispatch(command, cfg);
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        ordered_json report;
        report["schema_version"] = kSchemaVersion;
        report["command"] = command;
        report["config"] = config_echo(cfg);
        report["seed"] = cfg.seed;
        report["results"] = std::move(result.results);
        report["timings"] = {{"total_seconds", elapsed}};

        if (sub->count("--csv")) {
            std::ofstream csv_file(csv_path, std::ios::binary);
            if (!csv_file) throw ConfigError("cannot write CSV file \"" + csv_path + "\"");
            csv_file << result.csv;
        }
        const std::string text = report.dump(2) + "\n";
        if (sub->count("--out")) {
            std::ofstream report_file(out_path, std::ios::binary);
            if (!report_file) throw ConfigError("cannot write report file \"" + out_path + "\"");
            report_file << text;
        } else {
            out << text;
        }
        return result.exit_code;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace ancont
