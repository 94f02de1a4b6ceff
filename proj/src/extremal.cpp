#include "ancont/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ancont/errors.hpp"

namespace ancont {

std::pair<double, double> bounds(const DomainSpec& domain) {
    validate(domain);
    const double a = area(domain);
    const double p = perimeter(domain);
    double lower = 2.0 * a / p;
    const double upper = std::sqrt(a / std::numbers::pi);
    if (lower > upper) lower = upper;  // disk equality case under roundoff
    return {lower, upper};
}

BoundsReport classify(const DomainSpec& domain, const MinimaxResult& result,
                      double relative_tolerance) {
    if (!(relative_tolerance >= 0.0))
        throw ValidationError("classification tolerance must be nonnegative");
    if (!result.converged)
        throw ValidationError(
            "cannot classify an unconverged solve; rerun with looser caps or more samples");

    BoundsReport report;
    std::tie(report.lower, report.upper) = bounds(domain);
    report.lambda_hat = result.lambda_hat;
    report.gap = report.lambda_hat - report.lower;
    report.tolerance = relative_tolerance * report.lower;
    report.is_extremal = report.gap <= report.tolerance;
    return report;
}

CovarianceReport covariance_check(const DomainSpec& domain, Complex a, Complex b,
                                  const ContentOptions& options) {
    if (a == Complex(0.0, 0.0)) throw ValidationError("covariance scale a must be nonzero");

    const MinimaxResult base = analytic_content(domain, options);
    const DomainSpec mapped = transform(domain, a, b);
    const MinimaxResult image = analytic_content(mapped, options);

    CovarianceReport report;
    report.lambda_base = base.lambda_hat;
    report.lambda_transformed = image.lambda_hat;
    report.lambda_ratio = image.lambda_hat / base.lambda_hat;
    report.converged = base.converged && image.converged;

    // z = a w + b maps conj(z) - phi_t(z) onto conj(a) (conj(w) - phi(w)),
    // so the minimizers must satisfy phi_t(z) = conj(a) phi((z-b)/a) + conj(b).
    double deviation = 0.0;
    for (const Complex z : image.verification.points) {
        const Complex w = (z - b) / a;
        const Complex predicted =
            std::conj(a) * evaluate_combination(base.basis, base.coefficients, w) + std::conj(b);
        const Complex actual = evaluate_combination(image.basis, image.coefficients, z);
        deviation = std::max(deviation, std::abs(actual - predicted));
    }
    report.coeff_transform_error = deviation;
    return report;
}

}  // namespace ancont
