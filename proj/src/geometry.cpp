#include "ancont/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "ancont/errors.hpp"

namespace ancont {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

// Periodic trapezoid sums converge geometrically for analytic integrands;
// doubling reuses the previous nodes.
template <class F>
double adaptive_periodic_integral(F&& f, int m0, double rel_tol = 1e-10) {
    int m = m0;
    double sum = 0.0;
    for (int j = 0; j < m; ++j) sum += f(kTwoPi * j / m);
    double value = sum * kTwoPi / m;
    for (int pass = 0; pass < 18; ++pass) {
        double odd = 0.0;
        for (int j = 0; j < m; ++j) odd += f(kTwoPi * (j + 0.5) / m);
        sum += odd;
        m *= 2;
        double next = sum * kTwoPi / m;
        if (std::abs(next - value) <= rel_tol * std::max(std::abs(next), 1e-300)) return next;
        value = next;
    }
    throw Error("boundary quadrature did not converge");
}

double polygon_signed_area(std::span<const Complex> vs) {
    double s = 0.0;
    for (std::size_t i = 0, n = vs.size(); i < n; ++i) s += cross(vs[i], vs[(i + 1) % n]);
    return 0.5 * s;
}

int fourier_max_order(const FourierSpec& f) {
    int k = 1;
    for (const auto& [order, coeff] : f.coefficients) k = std::max(k, std::abs(order));
    return k;
}

double curve_signed_area(const CurveSpec& curve) {
    return std::visit(
        overloaded{
            [](const CircleSpec& c) { return std::numbers::pi * c.radius * c.radius; },
            [](const EllipseSpec& e) { return std::numbers::pi * e.semi_major * e.semi_minor; },
            [](const PolygonSpec& p) { return polygon_signed_area(p.vertices); },
            [](const FourierSpec& f) {
                // closed form: cross terms integrate to zero
                double s = 0.0;
                for (const auto& [k, ck] : f.coefficients) s += k * std::norm(ck);
                return std::numbers::pi * s;
            }},
        curve);
}

double curve_scale(const CurveSpec& curve) {
    return std::max(curve_max_radius(curve), std::abs(curve_centroid(curve)));
}

// Even-odd crossing rule; adequate at sampled resolution.
bool point_in_polyline(std::span<const Complex> poly, Complex p) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const double xi = poly[i].real(), yi = poly[i].imag();
        const double xj = poly[j].real(), yj = poly[j].imag();
        if ((yi > p.imag()) != (yj > p.imag()) &&
            p.real() < (xj - xi) * (p.imag() - yi) / (yj - yi) + xi)
            inside = !inside;
    }
    return inside;
}

int sign_eps(double v, double eps) { return v > eps ? 1 : (v < -eps ? -1 : 0); }

bool on_segment(Complex a, Complex b, Complex c, double eps) {
    return std::min(a.real(), b.real()) - eps <= c.real() &&
           c.real() <= std::max(a.real(), b.real()) + eps &&
           std::min(a.imag(), b.imag()) - eps <= c.imag() &&
           c.imag() <= std::max(a.imag(), b.imag()) + eps;
}

// Touching counts as an intersection: boundaries must be strictly disjoint.
bool segments_intersect(Complex p1, Complex p2, Complex q1, Complex q2, double eps) {
    const double d1 = cross(q2 - q1, p1 - q1);
    const double d2 = cross(q2 - q1, p2 - q1);
    const double d3 = cross(p2 - p1, q1 - p1);
    const double d4 = cross(p2 - p1, q2 - p1);
    const int s1 = sign_eps(d1, eps), s2 = sign_eps(d2, eps);
    const int s3 = sign_eps(d3, eps), s4 = sign_eps(d4, eps);
    if (s1 * s2 < 0 && s3 * s4 < 0) return true;
    const double box_eps = std::sqrt(eps);
    if (s1 == 0 && on_segment(q1, q2, p1, box_eps)) return true;
    if (s2 == 0 && on_segment(q1, q2, p2, box_eps)) return true;
    if (s3 == 0 && on_segment(p1, p2, q1, box_eps)) return true;
    if (s4 == 0 && on_segment(p1, p2, q2, box_eps)) return true;
    return false;
}

bool polyline_is_simple(std::span<const Complex> pts, double eps) {
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;  // adjacent around the wrap
            if (segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n], eps))
                return false;
        }
    }
    return true;
}

bool polylines_disjoint(std::span<const Complex> a, std::span<const Complex> b, double eps) {
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            if (segments_intersect(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()], eps))
                return false;
    return true;
}

void validate_curve(const CurveSpec& curve, const std::string& who) {
    std::visit(
        overloaded{
            [&](const CircleSpec& c) {
                if (!finite(c.center) || !std::isfinite(c.radius))
                    throw ValidationError(who + ": non-finite circle parameters");
                if (c.radius <= 0.0) throw ValidationError(who + ": circle radius must be positive");
            },
            [&](const EllipseSpec& e) {
                if (!finite(e.center) || !std::isfinite(e.semi_major) ||
                    !std::isfinite(e.semi_minor) || !std::isfinite(e.rotation))
                    throw ValidationError(who + ": non-finite ellipse parameters");
                if (e.semi_minor <= 0.0 || e.semi_major < e.semi_minor)
                    throw ValidationError(who + ": ellipse needs semi_major >= semi_minor > 0");
            },
            [&](const PolygonSpec& p) {
                if (p.vertices.size() < 3)
                    throw ValidationError(who + ": polygon needs at least 3 vertices");
                double scale = 0.0;
                for (Complex v : p.vertices) {
                    if (!finite(v)) throw ValidationError(who + ": non-finite polygon vertex");
                    scale = std::max(scale, std::abs(v));
                }
                scale = std::max(scale, 1e-12);
                for (std::size_t i = 0; i < p.vertices.size(); ++i)
                    for (std::size_t j = i + 1; j < p.vertices.size(); ++j)
                        if (std::abs(p.vertices[i] - p.vertices[j]) <= 1e-12 * scale)
                            throw ValidationError(who + ": duplicate polygon vertices");
                if (std::abs(polygon_signed_area(p.vertices)) <= 1e-12 * scale * scale)
                    throw ValidationError(who + ": polygon vertices are collinear");
            },
            [&](const FourierSpec& f) {
                if (!finite(f.center)) throw ValidationError(who + ": non-finite curve center");
                if (f.coefficients.empty())
                    throw ValidationError(who + ": curve needs at least one coefficient");
                double total = 0.0;
                for (const auto& [k, ck] : f.coefficients) {
                    if (k == 0) throw ValidationError(who + ": coefficient order 0 belongs in center");
                    if (!finite(ck)) throw ValidationError(who + ": non-finite curve coefficient");
                    total += std::abs(ck);
                }
                if (total <= 0.0) throw ValidationError(who + ": degenerate curve (all coefficients zero)");
                if (std::abs(curve_signed_area(f)) <= 1e-12 * total * total)
                    throw ValidationError(who + ": curve encloses no area");
            }},
        curve);
}

struct PolygonSampler {
    // points_per_component applies per edge, graded toward vertices so the
    // cell widths telescope to the exact edge length.
    static void run(const PolygonSpec& poly, bool want_ccw, int m, int comp,
                    BoundarySampling& out) {
        std::vector<Complex> vs = poly.vertices;
        const bool ccw = polygon_signed_area(vs) > 0.0;
        if (ccw != want_ccw) std::reverse(vs.begin(), vs.end());
        const int edges = static_cast<int>(vs.size());
        for (int e = 0; e < edges; ++e) {
            const Complex a = vs[e];
            const Complex b = vs[(e + 1) % edges];
            const double len = std::abs(b - a);
            const Complex tangent = (b - a) / len;
            for (int r = 0; r < m; ++r) {
                const double u0 = 0.5 * (1.0 - std::cos(std::numbers::pi * r / m));
                const double u1 = 0.5 * (1.0 - std::cos(std::numbers::pi * (r + 1) / m));
                const double s = 0.5 * (1.0 - std::cos(std::numbers::pi * (r + 0.5) / m));
                out.points.push_back(a + s * (b - a));
                out.weights.push_back((u1 - u0) * len);
                out.tangents.push_back(tangent);
                out.params.push_back(kTwoPi * (e + s) / edges);
                out.component.push_back(comp);
            }
        }
    }
};

void sample_smooth(const CurveSpec& curve, bool want_ccw, int m, int comp, BoundarySampling& out) {
    const bool rev = (curve_is_ccw(curve) != want_ccw);
    for (int j = 0; j < m; ++j) {
        const double t = kTwoPi * j / m;
        const double theta = rev ? -t : t;
        const Complex z = curve_point(curve, theta);
        Complex d = curve_derivative(curve, theta);
        if (rev) d = -d;
        const double speed = std::abs(d);
        if (speed <= 0.0) throw ValidationError("stationary boundary parametrization");
        out.points.push_back(z);
        out.weights.push_back(speed * kTwoPi / m);
        out.tangents.push_back(d / speed);
        out.params.push_back(t);
        out.component.push_back(comp);
    }
}

}  // namespace

Complex curve_point(const CurveSpec& curve, double theta) {
    return std::visit(
        overloaded{
            [&](const CircleSpec& c) { return c.center + std::polar(c.radius, theta); },
            [&](const EllipseSpec& e) {
                const Complex u(e.semi_major * std::cos(theta), e.semi_minor * std::sin(theta));
                return e.center + std::polar(1.0, e.rotation) * u;
            },
            [&](const PolygonSpec& p) {
                const int n = static_cast<int>(p.vertices.size());
                double u = theta / kTwoPi * n;
                u -= std::floor(u / n) * n;  // wrap into [0, n)
                int e = std::min(static_cast<int>(u), n - 1);
                const double s = u - e;
                return p.vertices[e] + s * (p.vertices[(e + 1) % n] - p.vertices[e]);
            },
            [&](const FourierSpec& f) {
                Complex z = f.center;
                for (const auto& [k, ck] : f.coefficients) z += ck * std::polar(1.0, k * theta);
                return z;
            }},
        curve);
}

Complex curve_derivative(const CurveSpec& curve, double theta) {
    return std::visit(
        overloaded{
            [&](const CircleSpec& c) {
                return Complex(0.0, 1.0) * std::polar(c.radius, theta);
            },
            [&](const EllipseSpec& e) {
                const Complex u(-e.semi_major * std::sin(theta), e.semi_minor * std::cos(theta));
                return std::polar(1.0, e.rotation) * u;
            },
            [&](const PolygonSpec& p) {
                const int n = static_cast<int>(p.vertices.size());
                double u = theta / kTwoPi * n;
                u -= std::floor(u / n) * n;
                int e = std::min(static_cast<int>(u), n - 1);
                return (p.vertices[(e + 1) % n] - p.vertices[e]) * (n / kTwoPi);
            },
            [&](const FourierSpec& f) {
                Complex d = 0.0;
                for (const auto& [k, ck] : f.coefficients)
                    d += ck * Complex(0.0, k) * std::polar(1.0, k * theta);
                return d;
            }},
        curve);
}

double curve_area(const CurveSpec& curve) {
    if (const auto* f = std::get_if<FourierSpec>(&curve)) {
        // Green's theorem: A = 1/2 |Im oint conj(z) dz|
        const int m0 = std::max(64, 8 * fourier_max_order(*f));
        const double signed_area = 0.5 * adaptive_periodic_integral(
                                             [&](double t) {
                                                 const Complex z = curve_point(curve, t);
                                                 const Complex d = curve_derivative(curve, t);
                                                 return (std::conj(z) * d).imag();
                                             },
                                             m0);
        return std::abs(signed_area);
    }
    return std::abs(curve_signed_area(curve));
}

double curve_perimeter(const CurveSpec& curve) {
    return std::visit(
        overloaded{
            [](const CircleSpec& c) { return kTwoPi * c.radius; },
            [&](const EllipseSpec&) {
                return adaptive_periodic_integral(
                    [&](double t) { return std::abs(curve_derivative(curve, t)); }, 64);
            },
            [](const PolygonSpec& p) {
                double s = 0.0;
                const std::size_t n = p.vertices.size();
                for (std::size_t i = 0; i < n; ++i)
                    s += std::abs(p.vertices[(i + 1) % n] - p.vertices[i]);
                return s;
            },
            [&](const FourierSpec& f) {
                const int m0 = std::max(64, 8 * fourier_max_order(f));
                return adaptive_periodic_integral(
                    [&](double t) { return std::abs(curve_derivative(curve, t)); }, m0);
            }},
        curve);
}

Complex curve_centroid(const CurveSpec& curve) {
    return std::visit(
        overloaded{
            [](const CircleSpec& c) { return c.center; },
            [](const EllipseSpec& e) { return e.center; },
            [](const PolygonSpec& p) {
                // area centroid of the enclosed region
                const std::size_t n = p.vertices.size();
                Complex acc = 0.0;
                double a = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const Complex u = p.vertices[i], v = p.vertices[(i + 1) % n];
                    const double c = cross(u, v);
                    acc += (u + v) * c;
                    a += c;
                }
                return acc / (3.0 * a);
            },
            [](const FourierSpec& f) { return f.center; }},
        curve);
}

double curve_max_radius(const CurveSpec& curve) {
    const Complex c = curve_centroid(curve);
    return std::visit(
        overloaded{
            [](const CircleSpec& s) { return s.radius; },
            [](const EllipseSpec& e) { return e.semi_major; },
            [&](const PolygonSpec& p) {
                double r = 0.0;
                for (Complex v : p.vertices) r = std::max(r, std::abs(v - c));
                return r;
            },
            [&](const FourierSpec&) {
                double r = 0.0;
                for (int j = 0; j < 1024; ++j)
                    r = std::max(r, std::abs(curve_point(curve, kTwoPi * j / 1024) - c));
                return r;
            }},
        curve);
}

double curve_mean_radius(const CurveSpec& curve) {
    if (std::holds_alternative<CircleSpec>(curve))
        return std::get<CircleSpec>(curve).radius;
    const Complex c = curve_centroid(curve);
    if (const auto* p = std::get_if<PolygonSpec>(&curve)) {
        // arc-length average over the edges, 64 nodes each
        double num = 0.0, den = 0.0;
        const std::size_t n = p->vertices.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Complex a = p->vertices[i], b = p->vertices[(i + 1) % n];
            const double len = std::abs(b - a);
            for (int j = 0; j < 64; ++j) {
                const double s = (j + 0.5) / 64.0;
                num += std::abs(a + s * (b - a) - c) * len / 64.0;
            }
            den += len;
        }
        return num / den;
    }
    const double num = adaptive_periodic_integral(
        [&](double t) {
            return std::abs(curve_point(curve, t) - c) * std::abs(curve_derivative(curve, t));
        },
        256, 1e-9);
    return num / curve_perimeter(curve);
}

bool curve_is_ccw(const CurveSpec& curve) { return curve_signed_area(curve) > 0.0; }

std::vector<Complex> curve_polyline(const CurveSpec& curve, int min_points) {
    if (const auto* p = std::get_if<PolygonSpec>(&curve)) return p->vertices;
    int m = min_points;
    if (const auto* f = std::get_if<FourierSpec>(&curve))
        m = std::max(m, 16 * fourier_max_order(*f));
    std::vector<Complex> pts(m);
    for (int j = 0; j < m; ++j) pts[j] = curve_point(curve, kTwoPi * j / m);
    return pts;
}

void validate(const DomainSpec& domain) {
    validate_curve(domain.outer, domain.label.empty() ? "outer" : domain.label + " outer");
    for (std::size_t h = 0; h < domain.holes.size(); ++h)
        validate_curve(domain.holes[h], "hole " + std::to_string(h));

    double scale = curve_scale(domain.outer);
    for (const CurveSpec& hole : domain.holes) scale = std::max(scale, curve_scale(hole));
    const double eps = 1e-14 * scale * scale;

    const std::vector<Complex> outer = curve_polyline(domain.outer);
    if (!polyline_is_simple(outer, eps))
        throw ValidationError("outer boundary self-intersects");

    std::vector<std::vector<Complex>> holes;
    holes.reserve(domain.holes.size());
    for (std::size_t h = 0; h < domain.holes.size(); ++h) {
        holes.push_back(curve_polyline(domain.holes[h]));
        const std::vector<Complex>& poly = holes.back();
        const std::string who = "hole " + std::to_string(h);
        if (!polyline_is_simple(poly, eps)) throw ValidationError(who + " self-intersects");
        for (Complex p : poly)
            if (!point_in_polyline(outer, p))
                throw ValidationError(who + " is not strictly inside the outer boundary");
        if (!polylines_disjoint(outer, poly, eps))
            throw ValidationError(who + " touches the outer boundary");
    }
    for (std::size_t i = 0; i < holes.size(); ++i) {
        for (std::size_t j = i + 1; j < holes.size(); ++j) {
            if (!polylines_disjoint(holes[i], holes[j], eps) ||
                point_in_polyline(holes[j], holes[i].front()) ||
                point_in_polyline(holes[i], holes[j].front()))
                throw ValidationError("holes " + std::to_string(i) + " and " + std::to_string(j) +
                                      " overlap");
        }
    }
}

double area(const DomainSpec& domain) {
    validate(domain);
    double a = curve_area(domain.outer);
    for (const CurveSpec& hole : domain.holes) a -= curve_area(hole);
    if (a <= 0.0) throw ValidationError("holes exhaust the outer area");
    return a;
}

double perimeter(const DomainSpec& domain) {
    validate(domain);
    double p = curve_perimeter(domain.outer);
    for (const CurveSpec& hole : domain.holes) p += curve_perimeter(hole);
    return p;
}

int connectivity(const DomainSpec& domain) { return 1 + static_cast<int>(domain.holes.size()); }

BoundarySampling sample_boundary(const DomainSpec& domain, int points_per_component) {
    // Callers are expected to pass >= 16 for quadrature quality; anything
    // positive still produces a well-formed sampling.
    if (points_per_component < 1)
        throw ValidationError("sample_boundary needs a positive point count");
    validate(domain);
    BoundarySampling out;
    out.component_count = connectivity(domain);
    out.points_per_component = points_per_component;
    auto sample_one = [&](const CurveSpec& curve, bool want_ccw, int comp) {
        if (const auto* p = std::get_if<PolygonSpec>(&curve))
            PolygonSampler::run(*p, want_ccw, points_per_component, comp, out);
        else
            sample_smooth(curve, want_ccw, points_per_component, comp, out);
    };
    sample_one(domain.outer, true, 0);
    for (std::size_t h = 0; h < domain.holes.size(); ++h)
        sample_one(domain.holes[h], false, static_cast<int>(h) + 1);
    return out;
}

DomainSpec transform(const DomainSpec& domain, Complex a, Complex b) {
    if (std::abs(a) == 0.0) throw ValidationError("invalid transform: a must be nonzero");
    if (!finite(a) || !finite(b)) throw ValidationError("invalid transform: non-finite a or b");
    validate(domain);
    auto map_curve = [&](const CurveSpec& curve) -> CurveSpec {
        return std::visit(
            overloaded{
                [&](const CircleSpec& c) -> CurveSpec {
                    return CircleSpec{a * c.center + b, std::abs(a) * c.radius};
                },
                [&](const EllipseSpec& e) -> CurveSpec {
                    double rot = e.rotation + std::arg(a);
                    rot = std::remainder(rot, kTwoPi);
                    return EllipseSpec{a * e.center + b, std::abs(a) * e.semi_major,
                                       std::abs(a) * e.semi_minor, rot};
                },
                [&](const PolygonSpec& p) -> CurveSpec {
                    PolygonSpec out;
                    out.vertices.reserve(p.vertices.size());
                    for (Complex v : p.vertices) out.vertices.push_back(a * v + b);
                    return out;
                },
                [&](const FourierSpec& f) -> CurveSpec {
                    FourierSpec out;
                    out.center = a * f.center + b;
                    out.coefficients.reserve(f.coefficients.size());
                    for (const auto& [k, ck] : f.coefficients) out.coefficients.emplace_back(k, a * ck);
                    return out;
                }},
            curve);
    };
    DomainSpec out;
    out.outer = map_curve(domain.outer);
    out.holes.reserve(domain.holes.size());
    for (const CurveSpec& hole : domain.holes) out.holes.push_back(map_curve(hole));
    out.label = domain.label;
    return out;
}

bool contains(const DomainSpec& domain, Complex z) {
    const std::vector<Complex> outer = curve_polyline(domain.outer);
    if (!point_in_polyline(outer, z)) return false;
    for (const CurveSpec& hole : domain.holes)
        if (point_in_polyline(curve_polyline(hole), z)) return false;
    return true;
}

bool curve_encloses(const CurveSpec& curve, Complex z) {
    return point_in_polyline(curve_polyline(curve), z);
}

std::vector<Complex> interior_points(const DomainSpec& domain, int count, std::uint64_t seed) {
    if (count <= 0) throw ValidationError("interior_points needs count > 0");
    validate(domain);
    const std::vector<Complex> outer = curve_polyline(domain.outer);
    std::vector<std::vector<Complex>> holes;
    for (const CurveSpec& hole : domain.holes) holes.push_back(curve_polyline(hole));

    double xmin = outer[0].real(), xmax = xmin, ymin = outer[0].imag(), ymax = ymin;
    for (Complex p : outer) {
        xmin = std::min(xmin, p.real());
        xmax = std::max(xmax, p.real());
        ymin = std::min(ymin, p.imag());
        ymax = std::max(ymax, p.imag());
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(xmin, xmax), uy(ymin, ymax);
    std::vector<Complex> pts;
    pts.reserve(count);
    long attempts = 0;
    const long max_attempts = 100000L + 10000L * count;
    while (static_cast<int>(pts.size()) < count) {
        if (++attempts > max_attempts)
            throw ValidationError("interior sampling failed: domain too thin at this resolution");
        const Complex z(ux(rng), uy(rng));
        if (!point_in_polyline(outer, z)) continue;
        bool in_hole = false;
        for (const auto& hole : holes)
            if (point_in_polyline(hole, z)) {
                in_hole = true;
                break;
            }
        if (!in_hole) pts.push_back(z);
    }
    return pts;
}

}  // namespace ancont
