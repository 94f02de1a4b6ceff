#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ancont {

using Complex = std::complex<double>;

struct CircleSpec {
    Complex center{0.0, 0.0};
    double radius = 1.0;
};

struct EllipseSpec {
    Complex center{0.0, 0.0};
    double semi_major = 1.0;
    double semi_minor = 1.0;
    double rotation = 0.0;  // radians, CCW tilt of the major axis
};

struct PolygonSpec {
    std::vector<Complex> vertices;  // closed implicitly, any orientation
};

// theta -> center + sum_k coeff_k * exp(i k theta), k nonzero integers
struct FourierSpec {
    Complex center{0.0, 0.0};
    std::vector<std::pair<int, Complex>> coefficients;
};

using CurveSpec = std::variant<CircleSpec, EllipseSpec, PolygonSpec, FourierSpec>;

// A bounded finitely connected domain: one outer boundary, zero or more holes.
struct DomainSpec {
    CurveSpec outer;
    std::vector<CurveSpec> holes;
    std::string label;
};

// Quadrature-ready discretization of all boundary components.
// Component 0 is the outer curve traversed CCW; components 1..n are holes
// traversed CW, so the domain always lies to the left of the tangent.
struct BoundarySampling {
    std::vector<Complex> points;
    std::vector<double> weights;    // arc-length cell widths; sum == perimeter
    std::vector<int> component;
    std::vector<Complex> tangents;  // unit tangents in traversal direction
    std::vector<double> params;     // traversal parameter in [0, 2pi)
    int component_count = 0;
    int points_per_component = 0;
};

// Per-curve evaluation in the curve's own parametrization.
Complex curve_point(const CurveSpec& curve, double theta);
Complex curve_derivative(const CurveSpec& curve, double theta);

double curve_area(const CurveSpec& curve);       // unsigned enclosed area
double curve_perimeter(const CurveSpec& curve);
Complex curve_centroid(const CurveSpec& curve);
double curve_max_radius(const CurveSpec& curve);   // max |z - centroid|
double curve_mean_radius(const CurveSpec& curve);  // arc-length average of |z - centroid|
bool curve_is_ccw(const CurveSpec& curve);

// Polyline snapshot used for validation-resolution predicates. Polygons
// return their vertex list; smooth curves are sampled at >= min_points.
std::vector<Complex> curve_polyline(const CurveSpec& curve, int min_points = 512);

// Structural checks: positive radii, simple non-self-intersecting boundaries,
// holes strictly inside the outer curve and pairwise disjoint. All curve/curve
// predicates run at sampled resolution. Throws ValidationError.
void validate(const DomainSpec& domain);

double area(const DomainSpec& domain);       // outer area minus hole areas
double perimeter(const DomainSpec& domain);  // total boundary length
int connectivity(const DomainSpec& domain);  // 1 + number of holes

// Equispaced-parameter sampling with points_per_component nodes per smooth
// component; polygons get points_per_component nodes per *edge*, graded
// toward the vertices. Callers should use >= 16 per component.
BoundarySampling sample_boundary(const DomainSpec& domain, int points_per_component);

// z -> a*z + b applied to every curve. Requires a != 0.
DomainSpec transform(const DomainSpec& domain, Complex a, Complex b);

// Strict interior test at sampled resolution.
bool contains(const DomainSpec& domain, Complex z);

// Whether z lies inside the region enclosed by a single curve.
bool curve_encloses(const CurveSpec& curve, Complex z);

// Deterministic rejection sampling of interior points.
std::vector<Complex> interior_points(const DomainSpec& domain, int count, std::uint64_t seed);

}  // namespace ancont
