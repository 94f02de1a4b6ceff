#pragma once

// Shared fixtures for the test suites: independent oracles (kept free of any
// library code under test) and the standard domain zoo.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ancont/geometry.hpp"

namespace testsupport {

using ancont::Complex;

// Complete elliptic integral of the second kind E(m), parameter m = k^2,
// via the arithmetic-geometric mean (Abramowitz & Stegun 17.6).
inline double complete_elliptic_e(double m) {
    if (m < 0.0 || m >= 1.0) throw std::invalid_argument("elliptic parameter out of range");
    double a = 1.0, b = std::sqrt(1.0 - m), c = std::sqrt(m);
    double csum = 0.5 * c * c;  // sum of 2^{n-1} c_n^2
    double pow2 = 0.5;
    for (int n = 0; n < 64 && c > 1e-17; ++n) {
        const double an = 0.5 * (a + b);
        const double bn = std::sqrt(a * b);
        c = 0.5 * (a - b);
        pow2 *= 2.0;
        csum += pow2 * c * c;
        a = an;
        b = bn;
    }
    const double big_k = std::numbers::pi / (2.0 * a);
    return big_k * (1.0 - csum);
}

// Ellipse circumference 4 a E(e^2): the independent check for the quadrature.
inline double ellipse_perimeter_oracle(double a, double b) {
    return 4.0 * a * complete_elliptic_e(1.0 - (b * b) / (a * a));
}

// Signed enclosed area of theta -> center + sum c_k e^{ik theta}; cross terms
// integrate to zero, leaving pi * sum k |c_k|^2.
inline double fourier_area_oracle(const std::vector<std::pair<int, Complex>>& coefficients) {
    double s = 0.0;
    for (const auto& [k, ck] : coefficients) s += k * std::norm(ck);
    return std::numbers::pi * s;
}

// --- the domain zoo ---

inline ancont::DomainSpec disk(double r, Complex center = {0.0, 0.0}) {
    ancont::DomainSpec d;
    d.outer = ancont::CircleSpec{center, r};
    d.label = "disk";
    return d;
}

inline ancont::DomainSpec annulus(double r1, double r2, Complex center = {0.0, 0.0}) {
    ancont::DomainSpec d;
    d.outer = ancont::CircleSpec{center, r1};
    d.holes.push_back(ancont::CircleSpec{center, r2});
    d.label = "annulus";
    return d;
}

inline ancont::DomainSpec ellipse(double a, double b, double rotation = 0.0,
                                  Complex center = {0.0, 0.0}) {
    ancont::DomainSpec d;
    d.outer = ancont::EllipseSpec{center, a, b, rotation};
    d.label = "ellipse";
    return d;
}

inline ancont::DomainSpec square(double side, Complex center = {0.0, 0.0}) {
    const double h = side / 2.0;
    ancont::DomainSpec d;
    d.outer = ancont::PolygonSpec{{center + Complex(-h, -h), center + Complex(h, -h),
                                   center + Complex(h, h), center + Complex(-h, h)}};
    d.label = "square";
    return d;
}

// Equilateral triangle, centroid at the origin.
inline ancont::DomainSpec triangle(double side) {
    const double rc = side / std::sqrt(3.0);  // circumradius
    ancont::DomainSpec d;
    ancont::PolygonSpec p;
    for (int k = 0; k < 3; ++k) {
        const double th = std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * k / 3.0;
        p.vertices.push_back(std::polar(rc, th));
    }
    d.outer = std::move(p);
    d.label = "triangle";
    return d;
}

// Radius-3 disk with unit-disk holes at +-1.5.
inline ancont::DomainSpec three_connected() {
    ancont::DomainSpec d;
    d.outer = ancont::CircleSpec{{0.0, 0.0}, 3.0};
    d.holes.push_back(ancont::CircleSpec{{-1.5, 0.0}, 1.0});
    d.holes.push_back(ancont::CircleSpec{{1.5, 0.0}, 1.0});
    d.label = "three-connected";
    return d;
}

}  // namespace testsupport
