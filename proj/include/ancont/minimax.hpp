#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ancont/geometry.hpp"

namespace ancont {

// One term of the approximation family: ((z - center)/scale)^exponent.
// Negative exponents are poles; their centers must lie inside holes.
struct BasisElement {
    Complex center{0.0, 0.0};
    int exponent = 0;
    double scale = 1.0;
};

Complex evaluate_element(const BasisElement& e, Complex z);
Complex evaluate_combination(std::span<const BasisElement> basis,
                             std::span<const Complex> coefficients, Complex z);

// Coefficient of (z - center)^k once the scale normalization is peeled off.
Complex unscaled_coefficient(const BasisElement& e, Complex coefficient);

// Polynomial part centered at the outer centroid (scale = max boundary
// distance), pole part per hole with exponents -1..-pole_degree (scale =
// hole mean radius). Poles are skipped on simply connected domains.
std::vector<BasisElement> build_basis(const DomainSpec& domain, int poly_degree, int pole_degree);

Eigen::MatrixXcd design_matrix(std::span<const BasisElement> basis,
                               const BoundarySampling& samples);

struct LawsonOptions {
    int max_iterations = 2000;
    double tolerance = 1e-8;     // relative minimax gap at which to stop
    double weight_floor = 1e-14;
    std::vector<double> initial_weights;  // optional warm start, one per sample
};

struct RefinementStep {
    int samples_per_component = 0;
    int poly_degree = 0;
    int pole_degree = 0;
    double lambda_hat = 0.0;
    double lower_bound = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct MinimaxResult {
    std::vector<Complex> coefficients;   // one per basis element
    double lambda_hat = 0.0;             // max |residual| on the verification grid
    double lower_bound = 0.0;            // weighted-LS dual value, final iterate
    std::vector<Complex> residuals;      // verification-grid residuals
    int iterations = 0;
    bool converged = false;
    double equioscillation_ratio = 0.0;  // min/max of |residual| over the active set
    double condition_estimate = 0.0;     // design-matrix condition from the QR polish
    std::vector<double> final_weights;   // training weights at exit
    std::vector<BasisElement> basis;
    BoundarySampling samples;            // training grid
    BoundarySampling verification;
    std::vector<RefinementStep> ladder;  // filled by analytic_content
};

// Lawson iteratively reweighted least squares on target conj(z_i). When no
// verification sampling is supplied, residuals are reported on the training
// samples themselves.
MinimaxResult lawson_minimax(const BoundarySampling& samples,
                             std::span<const BasisElement> basis,
                             const LawsonOptions& options = {},
                             const BoundarySampling* verification = nullptr);

struct LpResult {
    double lambda_lp = 0.0;  // certified: lambda_discrete <= lambda_lp <= lambda_discrete/cos(pi/M)
    double t_raw = 0.0;      // raw optimum of the direction-relaxed LP
    std::vector<Complex> coefficients;
    int iterations = 0;
};

// Independent optimality oracle: relaxes |.| to M half-plane constraints,
// solves the dual with the dense simplex, and certifies the reported value
// from the recovered coefficients alone.
LpResult lp_crosscheck(const BoundarySampling& samples, std::span<const BasisElement> basis,
                       int directions);

struct ContentOptions {
    int samples = 256;      // initial points per component (per edge for polygons)
    int poly_degree = 8;
    int pole_degree = 6;
    double stability_tolerance = 1e-4;  // relative lambda change between refinements
    int max_samples = 2048;
    int max_degree = 48;
    int max_refinements = 8;
    LawsonOptions lawson;
};

// Driver: refine sampling density and basis degree together until lambda_hat
// stabilizes; the ladder of attempts is recorded in the result.
MinimaxResult analytic_content(const DomainSpec& domain, const ContentOptions& options = {});

// conj(z) - phi_hat(z) at arbitrary points (diagnostics; interior max checks).
std::vector<Complex> residual_field(const MinimaxResult& result,
                                    std::span<const BasisElement> basis,
                                    std::span<const Complex> points);

// 4x-density grid for residual verification. For polygon domains the graded
// grids do not nest, so training nodes are merged in to keep the verification
// maximum an upper bound for the training maximum.
BoundarySampling verification_sampling(const DomainSpec& domain, const BoundarySampling& training);

}  // namespace ancont
