#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ancont/geometry.hpp"

namespace ancont {

// Finite Laurent description of phi' about the origin, plus the content
// value lambda that normalizes the ODE  v'' + (phi'/lambda^2) v = 0.
struct ProjectiveConnection {
    double lambda = 0.0;
    std::vector<std::pair<int, Complex>> phi_prime;  // (exponent, coefficient)
    std::string potential_label;
};

// The annulus family: phi = R1 R2 / z, so phi' is the single term -R1 R2 z^-2.
// R2 = 0 degenerates to the disk with phi' = 0. Requires R1 > R2 >= 0.
ProjectiveConnection annulus_connection(double r1, double r2);

Complex phi_prime_value(const ProjectiveConnection& connection, Complex z);

enum class ChiralKind { v1, v2 };

// v1(z) = (z/R1)^(R1/lambda), v2(z) = (R2/z)^(R2/lambda) with lambda = R1-R2,
// evaluated on the principal branch. R2 = 0 makes v2 identically 1.
struct ChiralField {
    ChiralKind kind = ChiralKind::v1;
    double r1 = 0.0;
    double r2 = 0.0;
    double exponent = 0.0;  // R1/lambda for v1, R2/lambda for v2
    double weight = 0.0;    // conformal weight R2/lambda
};

ChiralField chiral_field(ChiralKind kind, double r1, double r2);

Complex field_value(const ChiralField& field, Complex z);
Complex field_derivative(const ChiralField& field, Complex z);
Complex field_second_derivative(const ChiralField& field, Complex z);

// Closed-form check of v'' + (phi'/lambda^2) v = 0: max residual over the
// points, relative to max(1, max|v''|). Points must stay off the origin, and
// off the branch-cut sector (width 0.1 rad around the negative real axis)
// when the field exponent is not an integer.
double ode_residual(const ProjectiveConnection& connection, const ChiralField& field,
                    std::span<const Complex> points);

// Integrates the ODE from (v0, dv0) at z0 along the straight segments
// z0 -> path[0] -> path[1] -> ...; returns v at each path node. Adaptive
// embedded Runge-Kutta with local error kept well under 1e-10. Paths that
// touch the origin (double pole) fail with the offending location.
std::vector<Complex> ode_integrate(const ProjectiveConnection& connection, Complex z0, Complex v0,
                                   Complex dv0, std::span<const Complex> path);

// max | |v(z_i)| - 1 | over samples that must lie on the field's own circle
// (|z| = R1 for v1, R2 for v2); anything else is a hard error.
double boundary_modulus_check(const ChiralField& field, const BoundarySampling& samples);

// Same deviation on arbitrary points, no membership requirement (diagnostic).
double modulus_deviation(const ChiralField& field, std::span<const Complex> points);

// |e^(2 pi i R/lambda) - 1|; exactly 0.0 when R/lambda is an integer to
// within 1e-9, since the defect is then pure roundoff.
double monodromy_defect(double r, double lambda);

struct QuantizedAnnulus {
    int n = 0;
    double lambda = 0.0;
    double r1 = 0.0;    // n lambda
    double r2 = 0.0;    // (n-1) lambda
    double area = 0.0;  // (2n-1) pi lambda^2
};

// The single-valued family for a given lambda: n = 1 (disk) through n_max.
std::vector<QuantizedAnnulus> enumerate_quantized(double lambda, int n_max);

struct BoundaryLimitReport {
    double v1_deviation = 0.0;  // sup |v1(R1 e^{i t}) - e^{i n t}|
    double v2_deviation = 0.0;  // sup |v2(R2 e^{i t}) - e^{-i (n-1) t}|
};

// Only quantized annuli have single-valued boundary limits; non-integer
// exponents are refused.
BoundaryLimitReport boundary_limit_check(const QuantizedAnnulus& q, int samples_per_component);

struct DerivativeIdentityReport {
    Complex constant;            // fitted value of v1 v2'
    double deviation = 0.0;      // sup |v1 v2' - constant|
    Complex symmetric_constant;  // fitted value of v2 v1'
    double symmetric_deviation = 0.0;
};

// v1 v2' and v2 v1' are constant for every annulus because the exponents
// differ by exactly one. Requires R1 > R2 > 0 (the disk limit has v2' = 0).
DerivativeIdentityReport derivative_identity_check(double r1, double r2,
                                                   std::span<const Complex> points);

// Equispaced points on |z| = radius that keep clear of the branch-cut
// sector; the standard grid for residual and identity checks.
std::vector<Complex> circle_points(double radius, int count);

}  // namespace ancont
