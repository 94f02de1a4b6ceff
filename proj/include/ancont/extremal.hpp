#pragma once

#include "ancont/geometry.hpp"
#include "ancont/minimax.hpp"

namespace ancont {

struct BoundsReport {
    double lower = 0.0;   // 2 Area / Perimeter
    double upper = 0.0;   // sqrt(Area / pi)
    double lambda_hat = 0.0;
    double gap = 0.0;     // lambda_hat - lower
    bool is_extremal = false;
    double tolerance = 0.0;  // absolute gap threshold actually applied
};

// (2A/P, sqrt(A/pi)). The lower bound can only exceed the upper through
// quadrature roundoff on a disk, where the two coincide; that case is
// clamped so lower <= upper holds unconditionally.
std::pair<double, double> bounds(const DomainSpec& domain);

// Extremality verdict for a solved domain. The tolerance argument is
// relative; the applied absolute threshold is relative_tolerance * lower and
// is echoed in the report. Refuses results that did not converge.
BoundsReport classify(const DomainSpec& domain, const MinimaxResult& result,
                      double relative_tolerance = 5e-3);

struct CovarianceReport {
    double lambda_base = 0.0;
    double lambda_transformed = 0.0;
    double lambda_ratio = 0.0;          // expected |a|
    double coeff_transform_error = 0.0; // sup deviation from the minimizer law
    bool converged = false;
};

// Solves the domain and its image under z -> a z + b, then checks that the
// content scales by |a| and that the transformed minimizer matches
// phi_t(z) = conj(a) phi((z - b)/a) + conj(b) on the verification grid.
CovarianceReport covariance_check(const DomainSpec& domain, Complex a, Complex b,
                                  const ContentOptions& options = {});

}  // namespace ancont
