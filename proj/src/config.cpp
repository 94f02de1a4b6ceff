#include "ancont/config.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>

#include "ancont/errors.hpp"

namespace ancont {
namespace {

using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config field \"" + path + "\": " + what);
}

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void expect_object(const ordered_json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object");
}

// Strictness hinges on this: every object's key set is checked against the
// schema before any field is read, so typos never silently fall back to
// defaults.
void reject_unknown(const ordered_json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) fail(join(path, it.key()), "unknown key");
    }
}

const ordered_json* find(const ordered_json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &it.value();
}

const ordered_json& require(const ordered_json& obj, const std::string& path, const char* key) {
    const ordered_json* v = find(obj, key);
    if (!v) fail(join(path, key), "missing required field");
    return *v;
}

double as_double(const ordered_json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

double double_in(const ordered_json& v, const std::string& path, double lo, double hi) {
    const double x = as_double(v, path);
    if (!(x > lo && x < hi)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "must lie strictly between %g and %g", lo, hi);
        fail(path, buf);
    }
    return x;
}

int int_in(const ordered_json& v, const std::string& path, int lo, int hi) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > hi) fail(path, "must lie in " + std::to_string(lo) + ".." + std::to_string(hi));
    return static_cast<int>(x);
}

std::uint64_t as_seed(const ordered_json& v, const std::string& path) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        fail(path, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
}

Complex as_complex(const ordered_json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        fail(path, "expected a complex number as [re, im]");
    return {v[0].get<double>(), v[1].get<double>()};
}

CurveSpec parse_curve(const ordered_json& j, const std::string& path) {
    expect_object(j, path);
    const ordered_json& type = require(j, path, "type");
    if (!type.is_string()) fail(join(path, "type"), "expected a string");
    const std::string kind = type.get<std::string>();
    if (kind == "circle") {
        reject_unknown(j, path, {"type", "center", "radius"});
        CircleSpec c;
        if (const ordered_json* v = find(j, "center")) c.center = as_complex(*v, join(path, "center"));
        c.radius = as_double(require(j, path, "radius"), join(path, "radius"));
        return c;
    }
    if (kind == "ellipse") {
        reject_unknown(j, path, {"type", "center", "semi_major", "semi_minor", "rotation"});
        EllipseSpec e;
        if (const ordered_json* v = find(j, "center")) e.center = as_complex(*v, join(path, "center"));
        e.semi_major = as_double(require(j, path, "semi_major"), join(path, "semi_major"));
        e.semi_minor = as_double(require(j, path, "semi_minor"), join(path, "semi_minor"));
        if (const ordered_json* v = find(j, "rotation")) e.rotation = as_double(*v, join(path, "rotation"));
        return e;
    }
    if (kind == "polygon") {
        reject_unknown(j, path, {"type", "vertices"});
        const ordered_json& verts = require(j, path, "vertices");
        if (!verts.is_array() || verts.size() < 3)
            fail(join(path, "vertices"), "expected an array of at least 3 points");
        PolygonSpec p;
        for (std::size_t i = 0; i < verts.size(); ++i)
            p.vertices.push_back(as_complex(verts[i], join(path, "vertices[" + std::to_string(i) + "]")));
        return p;
    }
    if (kind == "fourier") {
        reject_unknown(j, path, {"type", "center", "coefficients"});
        FourierSpec f;
        if (const ordered_json* v = find(j, "center")) f.center = as_complex(*v, join(path, "center"));
        const ordered_json& coeffs = require(j, path, "coefficients");
        if (!coeffs.is_array() || coeffs.empty()) fail(join(path, "coefficients"), "expected a nonempty array");
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            const std::string cp = join(path, "coefficients[" + std::to_string(i) + "]");
            const ordered_json& pair = coeffs[i];
            if (!pair.is_array() || pair.size() != 2) fail(cp, "expected [k, [re, im]]");
            if (!pair[0].is_number_integer()) fail(cp, "mode index must be an integer");
            const int k = pair[0].get<int>();
            if (k == 0) fail(cp, "mode index must be nonzero");
            f.coefficients.emplace_back(k, as_complex(pair[1], cp));
        }
        return f;
    }
    fail(join(path, "type"), "unknown curve type \"" + kind + "\" (circle, ellipse, polygon, fourier)");
}

DomainSpec parse_domain(const ordered_json& j, const std::string& path) {
    expect_object(j, path);
    reject_unknown(j, path, {"label", "outer", "holes"});
    DomainSpec d;
    if (const ordered_json* v = find(j, "label")) {
        if (!v->is_string()) fail(join(path, "label"), "expected a string");
        d.label = v->get<std::string>();
    }
    d.outer = parse_curve(require(j, path, "outer"), join(path, "outer"));
    if (const ordered_json* v = find(j, "holes")) {
        if (!v->is_array()) fail(join(path, "holes"), "expected an array");
        for (std::size_t i = 0; i < v->size(); ++i)
            d.holes.push_back(parse_curve((*v)[i], join(path, "holes[" + std::to_string(i) + "]")));
    }
    return d;
}

SolverConfig parse_solver(const ordered_json& j, const std::string& path) {
    expect_object(j, path);
    reject_unknown(j, path,
                   {"poly_degree", "pole_degree", "samples", "tolerance", "max_iterations", "lp_directions"});
    SolverConfig s;
    if (const ordered_json* v = find(j, "poly_degree"))
        s.poly_degree = int_in(*v, join(path, "poly_degree"), 0, 64);
    if (const ordered_json* v = find(j, "pole_degree"))
        s.pole_degree = int_in(*v, join(path, "pole_degree"), 0, 64);
    if (const ordered_json* v = find(j, "samples")) s.samples = int_in(*v, join(path, "samples"), 16, 4096);
    if (const ordered_json* v = find(j, "tolerance"))
        s.tolerance = double_in(*v, join(path, "tolerance"), 0.0, 1.0);
    if (const ordered_json* v = find(j, "max_iterations"))
        s.max_iterations = int_in(*v, join(path, "max_iterations"), 1, 100000);
    if (const ordered_json* v = find(j, "lp_directions"))
        s.lp_directions = int_in(*v, join(path, "lp_directions"), 8, 512);
    return s;
}

CovarianceParams parse_covariance(const ordered_json& j, const std::string& path) {
    expect_object(j, path);
    reject_unknown(j, path, {"a", "b"});
    CovarianceParams c;
    c.a = as_complex(require(j, path, "a"), join(path, "a"));
    if (c.a == Complex{0.0, 0.0}) fail(join(path, "a"), "scale must be nonzero");
    if (const ordered_json* v = find(j, "b")) c.b = as_complex(*v, join(path, "b"));
    return c;
}

QuantizeParams parse_quantize(const ordered_json& j, const std::string& path) {
    expect_object(j, path);
    reject_unknown(j, path, {"lambda", "n_max"});
    QuantizeParams q;
    if (const ordered_json* v = find(j, "lambda")) q.lambda = double_in(*v, join(path, "lambda"), 0.0, 1e6);
    if (const ordered_json* v = find(j, "n_max")) q.n_max = int_in(*v, join(path, "n_max"), 1, 64);
    return q;
}

ordered_json cplx(Complex z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json echo_curve(const CurveSpec& curve) {
    ordered_json j;
    if (const auto* c = std::get_if<CircleSpec>(&curve)) {
        j["type"] = "circle";
        j["center"] = cplx(c->center);
        j["radius"] = c->radius;
    } else if (const auto* e = std::get_if<EllipseSpec>(&curve)) {
        j["type"] = "ellipse";
        j["center"] = cplx(e->center);
        j["semi_major"] = e->semi_major;
        j["semi_minor"] = e->semi_minor;
        j["rotation"] = e->rotation;
    } else if (const auto* p = std::get_if<PolygonSpec>(&curve)) {
        j["type"] = "polygon";
        ordered_json verts = ordered_json::array();
        for (const Complex v : p->vertices) verts.push_back(cplx(v));
        j["vertices"] = std::move(verts);
    } else {
        const auto& f = std::get<FourierSpec>(curve);
        j["type"] = "fourier";
        j["center"] = cplx(f.center);
        ordered_json coeffs = ordered_json::array();
        for (const auto& [k, c] : f.coefficients) coeffs.push_back(ordered_json::array({k, cplx(c)}));
        j["coefficients"] = std::move(coeffs);
    }
    return j;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
    reject_unknown(doc, "", {"domain", "solver", "covariance", "quantize", "classify", "sweep", "seed"});
    RunConfig cfg;
    if (const ordered_json* v = find(doc, "domain")) cfg.domain = parse_domain(*v, "domain");
    if (const ordered_json* v = find(doc, "solver")) cfg.solver = parse_solver(*v, "solver");
    if (const ordered_json* v = find(doc, "covariance")) cfg.covariance = parse_covariance(*v, "covariance");
    if (const ordered_json* v = find(doc, "quantize")) cfg.quantize = parse_quantize(*v, "quantize");
    if (const ordered_json* v = find(doc, "classify")) {
        expect_object(*v, "classify");
        reject_unknown(*v, "classify", {"tolerance"});
        cfg.classify_tolerance =
            double_in(require(*v, "classify", "tolerance"), "classify.tolerance", 0.0, 1.0);
    }
    if (const ordered_json* v = find(doc, "sweep")) {
        expect_object(*v, "sweep");
        reject_unknown(*v, "sweep", {"points"});
        cfg.sweep_points = int_in(require(*v, "sweep", "points"), "sweep.points", 2, 256);
    }
    if (const ordered_json* v = find(doc, "seed")) cfg.seed = as_seed(*v, "seed");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

nlohmann::ordered_json config_echo(const RunConfig& config) {
    ordered_json j;
    if (config.domain) {
        ordered_json d;
        d["label"] = config.domain->label;
        d["outer"] = echo_curve(config.domain->outer);
        ordered_json holes = ordered_json::array();
        for (const CurveSpec& h : config.domain->holes) holes.push_back(echo_curve(h));
        d["holes"] = std::move(holes);
        j["domain"] = std::move(d);
    }
    j["solver"] = {{"poly_degree", config.solver.poly_degree},
                   {"pole_degree", config.solver.pole_degree},
                   {"samples", config.solver.samples},
                   {"tolerance", config.solver.tolerance},
                   {"max_iterations", config.solver.max_iterations},
                   {"lp_directions", config.solver.lp_directions}};
    if (config.covariance)
        j["covariance"] = {{"a", cplx(config.covariance->a)}, {"b", cplx(config.covariance->b)}};
    j["quantize"] = {{"lambda", config.quantize.lambda}, {"n_max", config.quantize.n_max}};
    j["classify"] = {{"tolerance", config.classify_tolerance}};
    j["sweep"] = {{"points", config.sweep_points}};
    j["seed"] = config.seed;
    return j;
}

}  // namespace ancont
