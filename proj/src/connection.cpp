#include "ancont/connection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "ancont/errors.hpp"

namespace ancont {

namespace {

constexpr double kBranchHalfWidth = 0.05;  // decisions: sector of width 0.1 rad

bool integral(double e) { return std::abs(e - std::round(e)) <= 1e-12; }

std::string format_point(Complex z) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "(%.6g, %.6g)", z.real(), z.imag());
    return buf;
}

// z = 0 is always out (double pole of the connection, origin of the power
// functions); the cut sector only matters for non-integer exponents.
void require_evaluable(std::span<const Complex> points, bool integral_exponent) {
    int rejected = 0;
    Complex first;
    for (const Complex z : points) {
        const bool at_origin = z == Complex(0.0, 0.0);
        const bool in_sector =
            !integral_exponent && std::numbers::pi - std::abs(std::arg(z)) < kBranchHalfWidth;
        if (at_origin || in_sector) {
            if (rejected == 0) first = z;
            ++rejected;
        }
    }
    if (rejected > 0)
        throw ValidationError("rejected " + std::to_string(rejected) +
                              " evaluation points at the origin or inside the branch-cut "
                              "sector, first " +
                              format_point(first));
}

Complex real_power(Complex base, double exponent) {
    if (exponent == 0.0) return {1.0, 0.0};
    return std::exp(exponent * std::log(base));
}

}  // namespace

ProjectiveConnection annulus_connection(double r1, double r2) {
    if (!(r1 > r2) || !(r2 >= 0.0))
        throw ValidationError("annulus connection requires R1 > R2 >= 0");
    ProjectiveConnection connection;
    connection.lambda = r1 - r2;
    if (r2 > 0.0) {
        connection.phi_prime.emplace_back(-2, Complex(-r1 * r2, 0.0));
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.12g/z", r1 * r2);
        connection.potential_label = buf;
    } else {
        connection.potential_label = "0";
    }
    return connection;
}

Complex phi_prime_value(const ProjectiveConnection& connection, Complex z) {
    Complex sum{0.0, 0.0};
    for (const auto& [k, c] : connection.phi_prime) {
        if (k < 0 && z == Complex(0.0, 0.0))
            throw ValidationError("phi' evaluated at its pole");
        sum += c * real_power(z, k);
    }
    return sum;
}

ChiralField chiral_field(ChiralKind kind, double r1, double r2) {
    if (!(r1 > r2) || !(r2 >= 0.0)) throw ValidationError("chiral field requires R1 > R2 >= 0");
    const double lambda = r1 - r2;
    ChiralField field;
    field.kind = kind;
    field.r1 = r1;
    field.r2 = r2;
    field.exponent = (kind == ChiralKind::v1 ? r1 : r2) / lambda;
    field.weight = r2 / lambda;
    return field;
}

Complex field_value(const ChiralField& field, Complex z) {
    if (field.kind == ChiralKind::v1) {
        if (z == Complex(0.0, 0.0)) return {0.0, 0.0};  // exponent > 0 always
        return real_power(z / field.r1, field.exponent);
    }
    if (field.exponent == 0.0) return {1.0, 0.0};  // disk limit, v2 = 1
    if (z == Complex(0.0, 0.0)) throw ValidationError("v2 evaluated at its singularity");
    return real_power(field.r2 / z, field.exponent);
}

Complex field_derivative(const ChiralField& field, Complex z) {
    if (field.exponent == 0.0) return {0.0, 0.0};
    if (z == Complex(0.0, 0.0)) throw ValidationError("field derivative evaluated at the origin");
    const double sign = field.kind == ChiralKind::v1 ? 1.0 : -1.0;
    return field_value(field, z) * (sign * field.exponent) / z;
}

Complex field_second_derivative(const ChiralField& field, Complex z) {
    if (field.exponent == 0.0) return {0.0, 0.0};
    if (z == Complex(0.0, 0.0)) throw ValidationError("field derivative evaluated at the origin");
    const double e = field.exponent;
    // (e)(e-1) for v1, (-e)(-e-1) = e(e+1) for v2
    const double factor = field.kind == ChiralKind::v1 ? e * (e - 1.0) : e * (e + 1.0);
    return field_value(field, z) * factor / (z * z);
}

double ode_residual(const ProjectiveConnection& connection, const ChiralField& field,
                    std::span<const Complex> points) {
    if (!(connection.lambda > 0.0)) throw ValidationError("connection lambda must be positive");
    if (points.empty()) throw ValidationError("ode_residual needs at least one point");
    require_evaluable(points, integral(field.exponent));

    const double inv_l2 = 1.0 / (connection.lambda * connection.lambda);
    double max_res = 0.0, max_dd = 0.0;
    for (const Complex z : points) {
        const Complex v = field_value(field, z);
        const Complex dd = field_second_derivative(field, z);
        const Complex res = dd + phi_prime_value(connection, z) * inv_l2 * v;
        max_res = std::max(max_res, std::abs(res));
        max_dd = std::max(max_dd, std::abs(dd));
    }
    return max_res / std::max(1.0, max_dd);
}

namespace {

struct OdeState {
    Complex v, w;  // w = dv/dz
};

// Dormand-Prince 5(4) step for the linear system along z(t) = origin + t d.
struct SegmentOde {
    const ProjectiveConnection* connection;
    double inv_l2;
    Complex origin, delta;

    OdeState rhs(double t, const OdeState& y) const {
        const Complex z = origin + t * delta;
        const Complex ddv = -phi_prime_value(*connection, z) * inv_l2 * y.v;
        return {y.w * delta, ddv * delta};
    }
};

OdeState axpy(const OdeState& y, double h, std::initializer_list<std::pair<double, const OdeState*>> terms) {
    OdeState out = y;
    for (const auto& [a, k] : terms) {
        out.v += h * a * k->v;
        out.w += h * a * k->w;
    }
    return out;
}

}  // namespace

std::vector<Complex> ode_integrate(const ProjectiveConnection& connection, Complex z0, Complex v0,
                                   Complex dv0, std::span<const Complex> path) {
    if (!(connection.lambda > 0.0)) throw ValidationError("connection lambda must be positive");

    bool singular_origin = false;
    for (const auto& [k, c] : connection.phi_prime)
        if (k < 0) singular_origin = true;

    constexpr double kAtol = 1e-12, kRtol = 1e-12;
    OdeState y{v0, dv0};
    Complex at = z0;
    std::vector<Complex> out;
    out.reserve(path.size());

    for (const Complex node : path) {
        const Complex d = node - at;
        if (std::abs(d) == 0.0) {
            out.push_back(y.v);
            continue;
        }
        if (singular_origin) {
            // distance from the origin to the segment
            const double t_star =
                std::clamp(-(at.real() * d.real() + at.imag() * d.imag()) / std::norm(d), 0.0, 1.0);
            const double dist = std::abs(at + t_star * d);
            if (dist < 1e-9 * std::max({1.0, std::abs(at), std::abs(node)}))
                throw IntegrationError("integration path passes through the origin near " +
                                       format_point(at + t_star * d));
        }

        const SegmentOde ode{&connection, 1.0 / (connection.lambda * connection.lambda), at, d};
        double t = 0.0, h = 0.5;
        while (t < 1.0) {
            h = std::min(h, 1.0 - t);
            if (h < 1e-13)
                throw IntegrationError("step size underflow near " +
                                       format_point(at + t * d));
            const OdeState k1 = ode.rhs(t, y);
            const OdeState k2 = ode.rhs(t + h / 5.0, axpy(y, h, {{1.0 / 5.0, &k1}}));
            const OdeState k3 =
                ode.rhs(t + 3.0 * h / 10.0, axpy(y, h, {{3.0 / 40.0, &k1}, {9.0 / 40.0, &k2}}));
            const OdeState k4 = ode.rhs(
                t + 4.0 * h / 5.0,
                axpy(y, h, {{44.0 / 45.0, &k1}, {-56.0 / 15.0, &k2}, {32.0 / 9.0, &k3}}));
            const OdeState k5 =
                ode.rhs(t + 8.0 * h / 9.0, axpy(y, h,
                                                {{19372.0 / 6561.0, &k1},
                                                 {-25360.0 / 2187.0, &k2},
                                                 {64448.0 / 6561.0, &k3},
                                                 {-212.0 / 729.0, &k4}}));
            const OdeState k6 = ode.rhs(t + h, axpy(y, h,
                                                    {{9017.0 / 3168.0, &k1},
                                                     {-355.0 / 33.0, &k2},
                                                     {46732.0 / 5247.0, &k3},
                                                     {49.0 / 176.0, &k4},
                                                     {-5103.0 / 18656.0, &k5}}));
            const OdeState y5 = axpy(y, h,
                                     {{35.0 / 384.0, &k1},
                                      {500.0 / 1113.0, &k3},
                                      {125.0 / 192.0, &k4},
                                      {-2187.0 / 6784.0, &k5},
                                      {11.0 / 84.0, &k6}});
            const OdeState k7 = ode.rhs(t + h, y5);
            const OdeState y4 = axpy(y, h,
                                     {{5179.0 / 57600.0, &k1},
                                      {7571.0 / 16695.0, &k3},
                                      {393.0 / 640.0, &k4},
                                      {-92097.0 / 339200.0, &k5},
                                      {187.0 / 2100.0, &k6},
                                      {1.0 / 40.0, &k7}});
            const double err_v = std::abs(y5.v - y4.v) / (kAtol + kRtol * std::abs(y5.v));
            const double err_w = std::abs(y5.w - y4.w) / (kAtol + kRtol * std::abs(y5.w));
            const double err = std::max(err_v, err_w);
            if (err <= 1.0) {
                t += h;
                y = y5;
            }
            const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            h *= std::clamp(grow, 0.2, 5.0);
        }
        at = node;
        out.push_back(y.v);
    }
    return out;
}

double boundary_modulus_check(const ChiralField& field, const BoundarySampling& samples) {
    if (samples.points.empty()) throw ValidationError("empty boundary sampling");
    const double radius = field.kind == ChiralKind::v1 ? field.r1 : field.r2;
    if (!(radius > 0.0))
        throw ValidationError("field's boundary component is degenerate (radius 0)");
    for (const Complex z : samples.points)
        if (std::abs(std::abs(z) - radius) > 1e-9 * radius)
            throw ValidationError("sample " + format_point(z) +
                                  " is not on the field's boundary circle |z| = " +
                                  std::to_string(radius));
    double deviation = 0.0;
    for (const Complex z : samples.points)
        deviation = std::max(deviation, std::abs(std::abs(field_value(field, z)) - 1.0));
    return deviation;
}

double modulus_deviation(const ChiralField& field, std::span<const Complex> points) {
    double deviation = 0.0;
    for (const Complex z : points)
        deviation = std::max(deviation, std::abs(std::abs(field_value(field, z)) - 1.0));
    return deviation;
}

double monodromy_defect(double r, double lambda) {
    if (!(lambda > 0.0)) throw ValidationError("monodromy defect requires lambda > 0");
    if (!(r > 0.0)) throw ValidationError("monodromy defect requires R > 0");
    const double ratio = r / lambda;
    if (std::abs(ratio - std::round(ratio)) <= 1e-9) return 0.0;
    // |e^{2 pi i q} - 1| = 2 |sin(pi q)|, reduced for accuracy
    return 2.0 * std::abs(std::sin(std::numbers::pi * std::remainder(ratio, 1.0)));
}

std::vector<QuantizedAnnulus> enumerate_quantized(double lambda, int n_max) {
    if (!(lambda > 0.0)) throw ValidationError("quantized family requires lambda > 0");
    if (n_max < 1) throw ValidationError("quantized family requires n_max >= 1");
    std::vector<QuantizedAnnulus> family;
    family.reserve(n_max);
    for (int n = 1; n <= n_max; ++n) {
        QuantizedAnnulus q;
        q.n = n;
        q.lambda = lambda;
        q.r1 = n * lambda;
        q.r2 = (n - 1) * lambda;
        q.area = (2 * n - 1) * std::numbers::pi * lambda * lambda;
        family.push_back(q);
    }
    return family;
}

BoundaryLimitReport boundary_limit_check(const QuantizedAnnulus& q, int samples_per_component) {
    if (q.n < 1 || !(q.lambda > 0.0)) throw ValidationError("invalid quantized annulus");
    if (samples_per_component < 1) throw ValidationError("need at least one boundary sample");
    if (std::abs(q.r1 - q.n * q.lambda) > 1e-9 * q.r1 ||
        std::abs(q.r2 - (q.n - 1) * q.lambda) > 1e-9 * std::max(q.r2, q.lambda))
        throw ValidationError("annulus is not quantized: R1, R2 must be n lambda, (n-1) lambda");

    const ChiralField v1 = chiral_field(ChiralKind::v1, q.r1, q.r2);
    const ChiralField v2 = chiral_field(ChiralKind::v2, q.r1, q.r2);
    BoundaryLimitReport report;
    for (int j = 0; j < samples_per_component; ++j) {
        const double theta = 2.0 * std::numbers::pi * j / samples_per_component;
        const Complex z1 = std::polar(q.r1, theta);
        report.v1_deviation = std::max(
            report.v1_deviation, std::abs(field_value(v1, z1) - std::polar(1.0, q.n * theta)));
        if (q.r2 > 0.0) {
            const Complex z2 = std::polar(q.r2, theta);
            report.v2_deviation =
                std::max(report.v2_deviation,
                         std::abs(field_value(v2, z2) - std::polar(1.0, -(q.n - 1) * theta)));
        }
    }
    return report;
}

DerivativeIdentityReport derivative_identity_check(double r1, double r2,
                                                   std::span<const Complex> points) {
    if (!(r1 > r2) || !(r2 > 0.0))
        throw ValidationError(
            "derivative identity needs R1 > R2 > 0; at R2 = 0 it degenerates (v2' = 0)");
    if (points.empty()) throw ValidationError("derivative identity needs evaluation points");
    const ChiralField v1 = chiral_field(ChiralKind::v1, r1, r2);
    const ChiralField v2 = chiral_field(ChiralKind::v2, r1, r2);
    require_evaluable(points, integral(v1.exponent) && integral(v2.exponent));

    std::vector<Complex> forward(points.size()), symmetric(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        forward[i] = field_value(v1, points[i]) * field_derivative(v2, points[i]);
        symmetric[i] = field_value(v2, points[i]) * field_derivative(v1, points[i]);
    }
    const auto fit = [](const std::vector<Complex>& values, Complex& constant, double& deviation) {
        Complex mean{0.0, 0.0};
        for (const Complex v : values) mean += v;
        mean /= static_cast<double>(values.size());
        constant = mean;
        deviation = 0.0;
        for (const Complex v : values) deviation = std::max(deviation, std::abs(v - mean));
    };
    DerivativeIdentityReport report;
    fit(forward, report.constant, report.deviation);
    fit(symmetric, report.symmetric_constant, report.symmetric_deviation);
    return report;
}

std::vector<Complex> circle_points(double radius, int count) {
    if (!(radius > 0.0)) throw ValidationError("circle radius must be positive");
    if (count < 1) throw ValidationError("need at least one circle point");
    constexpr double kMargin = kBranchHalfWidth + 0.01;
    const double span = 2.0 * (std::numbers::pi - kMargin);
    std::vector<Complex> points;
    points.reserve(count);
    for (int j = 0; j < count; ++j)
        points.push_back(std::polar(radius, -std::numbers::pi + kMargin + (j + 0.5) * span / count));
    return points;
}

}  // namespace ancont
