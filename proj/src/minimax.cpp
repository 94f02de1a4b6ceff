#include "ancont/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <variant>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "ancont/errors.hpp"
#include "ancont/simplex.hpp"

namespace ancont {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

constexpr int kDegreeCap = 64;

Complex ipow(Complex base, int k) {
    Complex r = 1.0;
    while (k > 0) {
        if (k & 1) r *= base;
        base *= base;
        k >>= 1;
    }
    return r;
}

struct ColumnScales {
    std::vector<double> s;
};

// Scale columns to unit max modulus on the sample set; keeps both the QR and
// the LP working near unit scale for high degrees.
ColumnScales equilibrate(MatrixXcd& a) {
    ColumnScales out;
    out.s.resize(a.cols());
    for (int j = 0; j < a.cols(); ++j) {
        const double s = a.col(j).cwiseAbs().maxCoeff();
        if (!(s > 0.0) || !std::isfinite(s))
            throw IllConditionedBasisError("basis element degenerate on the sample set");
        a.col(j) /= s;
        out.s[j] = s;
    }
    return out;
}

VectorXcd conj_targets(const BoundarySampling& samples) {
    VectorXcd t(samples.points.size());
    for (std::size_t i = 0; i < samples.points.size(); ++i) t[i] = std::conj(samples.points[i]);
    return t;
}

bool has_polygon(const DomainSpec& domain) {
    if (std::holds_alternative<PolygonSpec>(domain.outer)) return true;
    for (const CurveSpec& hole : domain.holes)
        if (std::holds_alternative<PolygonSpec>(hole)) return true;
    return false;
}

// Nearest-parameter transfer of Lawson weights onto a refined grid.
std::vector<double> transfer_weights(const BoundarySampling& from, std::span<const double> w,
                                     const BoundarySampling& to) {
    std::vector<double> out(to.points.size(), 0.0);
    for (std::size_t i = 0; i < to.points.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t pick = 0;
        for (std::size_t j = 0; j < from.points.size(); ++j) {
            if (from.component[j] != to.component[i]) continue;
            double d = std::abs(from.params[j] - to.params[i]);
            d = std::min(d, 2.0 * std::numbers::pi - d);
            if (d < best) {
                best = d;
                pick = j;
            }
        }
        out[i] = std::isfinite(best) ? w[pick] : 1.0;
    }
    return out;
}

}  // namespace

Complex evaluate_element(const BasisElement& e, Complex z) {
    const Complex u = (z - e.center) / e.scale;
    return e.exponent >= 0 ? ipow(u, e.exponent) : 1.0 / ipow(u, -e.exponent);
}

Complex evaluate_combination(std::span<const BasisElement> basis,
                             std::span<const Complex> coefficients, Complex z) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < basis.size(); ++j)
        acc += coefficients[j] * evaluate_element(basis[j], z);
    return acc;
}

Complex unscaled_coefficient(const BasisElement& e, Complex coefficient) {
    return coefficient * std::pow(e.scale, -static_cast<double>(e.exponent));
}

std::vector<BasisElement> build_basis(const DomainSpec& domain, int poly_degree,
                                      int pole_degree) {
    if (poly_degree < 0 || pole_degree < 0)
        throw ValidationError("basis degrees must be nonnegative");
    if (poly_degree > kDegreeCap || pole_degree > kDegreeCap)
        throw ValidationError("basis degree exceeds the cap of 64");
    validate(domain);

    std::vector<BasisElement> basis;
    const Complex c0 = curve_centroid(domain.outer);
    const double rho0 = curve_max_radius(domain.outer);
    for (int k = 0; k <= poly_degree; ++k) basis.push_back({c0, k, rho0});

    for (const CurveSpec& hole : domain.holes) {
        const Complex ch = curve_centroid(hole);
        if (!curve_encloses(hole, ch))
            throw ValidationError("hole centroid falls outside the hole; no pole anchor");
        const double rhoh = curve_mean_radius(hole);
        for (int k = 1; k <= pole_degree; ++k) basis.push_back({ch, -k, rhoh});
    }
    return basis;
}

Eigen::MatrixXcd design_matrix(std::span<const BasisElement> basis,
                               const BoundarySampling& samples) {
    if (basis.empty() || samples.points.empty())
        throw ValidationError("design matrix needs nonempty basis and samples");
    MatrixXcd a(samples.points.size(), basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j)
        for (std::size_t i = 0; i < samples.points.size(); ++i)
            a(i, j) = evaluate_element(basis[j], samples.points[i]);
    return a;
}

MinimaxResult lawson_minimax(const BoundarySampling& samples,
                             std::span<const BasisElement> basis, const LawsonOptions& options,
                             const BoundarySampling* verification) {
    const int n = static_cast<int>(samples.points.size());
    const int k = static_cast<int>(basis.size());
    if (k == 0) throw ValidationError("empty basis");
    if (n <= k) throw ValidationError("need more samples than basis elements");
    if (options.max_iterations < 1 || !(options.tolerance > 0.0) || options.weight_floor < 0.0)
        throw ValidationError("bad Lawson options");
    if (!options.initial_weights.empty() &&
        static_cast<int>(options.initial_weights.size()) != n)
        throw ValidationError("warm-start weight count does not match samples");

    MatrixXcd a = design_matrix(basis, samples);
    const ColumnScales scales = equilibrate(a);
    const VectorXcd t = conj_targets(samples);

    VectorXd w(n);
    if (options.initial_weights.empty()) {
        for (int i = 0; i < n; ++i) w[i] = samples.weights[i];
    } else {
        for (int i = 0; i < n; ++i) w[i] = options.initial_weights[i];
    }
    w /= w.sum();
    w = w.cwiseMax(options.weight_floor);
    w /= w.sum();

    // The inner weighted LS runs on normal equations with one refinement step;
    // orthogonal factorizations bracket the loop for rank checks and the
    // canonical reported solution.
    auto qr_solve = [&](const VectorXd& weights, double* cond) -> VectorXcd {
        const VectorXd sw = weights.cwiseSqrt();
        const MatrixXcd aw = sw.asDiagonal() * a;
        Eigen::ColPivHouseholderQR<MatrixXcd> qr(aw);
        if (qr.rank() < k)
            throw IllConditionedBasisError(
                "design matrix is rank deficient; lower the basis degree");
        if (cond) {
            const auto& r = qr.matrixR();
            *cond = std::abs(r(0, 0)) / std::abs(r(k - 1, k - 1));
        }
        return qr.solve((sw.asDiagonal() * t.matrix()).eval());
    };

    MatrixXcd aw(n, k);
    MatrixXcd gram(k, k);
    VectorXcd rhs(k), coeff(k), resid(n);

    double cond = 0.0;
    coeff = qr_solve(w, &cond);

    int iterations = 0;
    bool converged = false;
    Eigen::LDLT<MatrixXcd> ldlt;
    for (int it = 0; it < options.max_iterations; ++it) {
        ++iterations;
        if (it > 0) {
            aw.noalias() = w.asDiagonal() * a;
            gram.noalias() = a.adjoint() * aw;
            rhs.noalias() = aw.adjoint() * t;
            ldlt.compute(gram);
            coeff = ldlt.solve(rhs);
            // one step of iterative refinement recovers most of the squared
            // conditioning loss
            rhs.noalias() -= gram * coeff;
            coeff += ldlt.solve(rhs);
            if (!coeff.allFinite()) coeff = qr_solve(w, nullptr);
        }
        resid.noalias() = t - a * coeff;
        const double emax = resid.cwiseAbs().maxCoeff();
        if (!(emax > 0.0)) {
            converged = true;
            break;
        }
        const double wsum = w.sum();
        const double lower =
            std::min(std::sqrt(w.dot(resid.cwiseAbs2()) / wsum), emax);
        if ((emax - lower) / emax <= options.tolerance) {
            converged = true;
            break;
        }
        w = w.cwiseProduct(resid.cwiseAbs());
        w /= w.sum();
        w = w.cwiseMax(options.weight_floor);
    }

    // canonical final solve at the exit weights
    coeff = qr_solve(w, &cond);
    resid.noalias() = t - a * coeff;
    const double train_max = resid.cwiseAbs().maxCoeff();
    const double lower =
        std::min(std::sqrt(w.dot(resid.cwiseAbs2()) / w.sum()), train_max);

    MinimaxResult result;
    result.basis.assign(basis.begin(), basis.end());
    result.samples = samples;
    result.coefficients.resize(k);
    for (int j = 0; j < k; ++j) result.coefficients[j] = coeff[j] / scales.s[j];
    result.iterations = iterations;
    result.converged = converged;
    result.condition_estimate = cond;
    result.final_weights.assign(w.data(), w.data() + n);

    result.verification = verification ? *verification : samples;
    result.residuals =
        residual_field(result, result.basis, result.verification.points);
    double vmax = 0.0;
    for (Complex r : result.residuals) vmax = std::max(vmax, std::abs(r));
    result.lambda_hat = vmax;
    result.lower_bound = std::min(lower, result.lambda_hat);

    double vmin_active = vmax;
    for (Complex r : result.residuals)
        if (std::abs(r) >= 0.95 * vmax) vmin_active = std::min(vmin_active, std::abs(r));
    result.equioscillation_ratio = vmax > 0.0 ? vmin_active / vmax : 1.0;
    return result;
}

LpResult lp_crosscheck(const BoundarySampling& samples, std::span<const BasisElement> basis,
                       int directions) {
    if (directions < 8) throw ValidationError("lp_crosscheck needs at least 8 directions");
    const int n = static_cast<int>(samples.points.size());
    const int k = static_cast<int>(basis.size());
    if (n == 0 || k == 0) throw ValidationError("empty samples or basis");
    const int rows = 2 * k + 1;
    const long cols = static_cast<long>(n) * directions;
    if (static_cast<double>(rows + 2) * cols > 2.5e8)
        throw ValidationError("LP cross-check problem too large; reduce samples or directions");

    MatrixXcd a = design_matrix(basis, samples);
    const ColumnScales scales = equilibrate(a);
    const VectorXcd t = conj_targets(samples);

    std::vector<double> cosm(directions), sinm(directions);
    for (int m = 0; m < directions; ++m) {
        const double th = 2.0 * std::numbers::pi * m / directions;
        cosm[m] = std::cos(th);
        sinm[m] = std::sin(th);
    }

    // dual of  min t  s.t.  Re(e^{-i th_m}(t_i - (Ac)_i)) <= t :
    // max beta.mu  s.t.  sum mu_q g_q = 0,  sum mu_q = 1,  mu >= 0
    std::vector<double> rhs(rows, 0.0);
    rhs[rows - 1] = 1.0;
    std::vector<double> cost(cols);
    for (long q = 0; q < cols; ++q) {
        const int i = static_cast<int>(q / directions);
        const int m = static_cast<int>(q % directions);
        cost[q] = -(cosm[m] * t[i].real() + sinm[m] * t[i].imag());
    }
    auto fill = [&](int q, std::span<double> out) {
        const int i = q / directions;
        const int m = q % directions;
        for (int j = 0; j < k; ++j) {
            const Complex u = a(i, j);
            // Re(e^{-i th} u) and the coefficient of Im(c_j)
            out[j] = cosm[m] * u.real() + sinm[m] * u.imag();
            out[k + j] = cosm[m] * u.imag() - sinm[m] * u.real();
        }
        out[rows - 1] = 1.0;
    };

    const lp::Solution sol =
        lp::solve_standard_form(rows, static_cast<int>(cols), fill, rhs, cost, 200000);
    const double t_raw = -sol.objective;

    // duals map to coefficients as c_j = -y_j + i y_{k+j}: the Im(c_j) column
    // of the dual enters with the opposite sign to the Re(c_j) column
    VectorXcd c(k);
    for (int j = 0; j < k; ++j) c[j] = Complex(-sol.dual[j], sol.dual[k + j]);
    const double t_dual = -sol.dual[rows - 1];

    // certify from scratch: the directional max of the recovered solution
    const VectorXcd r = t - a * c;
    double g = 0.0;
    for (int i = 0; i < n; ++i)
        for (int m = 0; m < directions; ++m)
            g = std::max(g, cosm[m] * r[i].real() + sinm[m] * r[i].imag());

    const double tol = 1e-8 * (1.0 + std::abs(t_raw));
    if (std::abs(t_dual - t_raw) > tol || std::abs(g - t_raw) > tol) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "LP certificate mismatch between value, duals, and residuals: "
                      "t=%.6e |t_dual-t|=%.3e |G-t|=%.3e",
                      t_raw, std::abs(t_dual - t_raw), std::abs(g - t_raw));
        throw OracleFailureError(msg);
    }

    LpResult out;
    out.t_raw = t_raw;
    out.lambda_lp = g / std::cos(std::numbers::pi / directions);
    out.iterations = sol.iterations;
    out.coefficients.resize(k);
    for (int j = 0; j < k; ++j) out.coefficients[j] = c[j] / scales.s[j];
    return out;
}

BoundarySampling verification_sampling(const DomainSpec& domain,
                                       const BoundarySampling& training) {
    BoundarySampling dense = sample_boundary(domain, 4 * training.points_per_component);
    if (!has_polygon(domain)) return dense;  // equispaced grids nest exactly

    const std::size_t total = dense.points.size() + training.points.size();
    std::vector<std::size_t> order(total);
    for (std::size_t i = 0; i < total; ++i) order[i] = i;
    auto comp_of = [&](std::size_t i) {
        return i < dense.points.size() ? dense.component[i]
                                       : training.component[i - dense.points.size()];
    };
    auto param_of = [&](std::size_t i) {
        return i < dense.points.size() ? dense.params[i]
                                       : training.params[i - dense.points.size()];
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (comp_of(x) != comp_of(y)) return comp_of(x) < comp_of(y);
        return param_of(x) < param_of(y);
    });

    BoundarySampling merged;
    merged.component_count = dense.component_count;
    merged.points_per_component = dense.points_per_component;
    for (std::size_t idx : order) {
        const bool from_dense = idx < dense.points.size();
        const std::size_t i = from_dense ? idx : idx - dense.points.size();
        const BoundarySampling& src = from_dense ? dense : training;
        if (!merged.params.empty() && merged.component.back() == src.component[i] &&
            std::abs(merged.params.back() - src.params[i]) < 1e-12)
            continue;
        merged.points.push_back(src.points[i]);
        merged.weights.push_back(src.weights[i]);
        merged.component.push_back(src.component[i]);
        merged.tangents.push_back(src.tangents[i]);
        merged.params.push_back(src.params[i]);
    }
    return merged;
}

MinimaxResult analytic_content(const DomainSpec& domain, const ContentOptions& options) {
    if (options.samples < 16 || options.samples > 16384)
        throw ValidationError("content options: samples out of range [16, 16384]");
    if (options.max_refinements < 1 || options.max_samples < options.samples ||
        options.max_degree < std::max(options.poly_degree, options.pole_degree))
        throw ValidationError("content options: inconsistent refinement caps");
    validate(domain);

    int m = options.samples;
    int poly = options.poly_degree;
    int pole = options.pole_degree;

    MinimaxResult result;
    std::vector<RefinementStep> ladder;
    BoundarySampling prev_samples;
    std::vector<double> prev_weights;
    double prev_lambda = -1.0;
    bool stable = false;

    for (int round = 0; round < options.max_refinements; ++round) {
        const BoundarySampling samples = sample_boundary(domain, m);
        const BoundarySampling verification = verification_sampling(domain, samples);
        const std::vector<BasisElement> basis = build_basis(domain, poly, pole);

        LawsonOptions lopt = options.lawson;
        if (!prev_weights.empty())
            lopt.initial_weights = transfer_weights(prev_samples, prev_weights, samples);
        result = lawson_minimax(samples, basis, lopt, &verification);

        ladder.push_back({m, poly, pole, result.lambda_hat, result.lower_bound,
                          result.iterations, result.converged});

        if (prev_lambda > 0.0 && std::abs(result.lambda_hat - prev_lambda) <=
                                     options.stability_tolerance * result.lambda_hat) {
            stable = true;
            break;
        }
        prev_lambda = result.lambda_hat;
        prev_samples = result.samples;
        prev_weights = result.final_weights;

        const int m2 = std::min(2 * m, options.max_samples);
        const int poly2 = std::min(poly + (poly + 1) / 2, options.max_degree);
        const int pole2 =
            pole > 0 ? std::min(pole + (pole + 1) / 2, options.max_degree) : 0;
        if (m2 == m && poly2 == poly && pole2 == pole) break;  // caps reached
        m = m2;
        poly = poly2;
        pole = pole2;
    }

    result.ladder = std::move(ladder);
    result.converged = result.converged && stable;
    return result;
}

std::vector<Complex> residual_field(const MinimaxResult& result,
                                    std::span<const BasisElement> basis,
                                    std::span<const Complex> points) {
    if (basis.size() != result.coefficients.size())
        throw ValidationError("basis does not match the result's coefficients");
    std::vector<Complex> out;
    out.reserve(points.size());
    for (Complex z : points)
        out.push_back(std::conj(z) - evaluate_combination(basis, result.coefficients, z));
    return out;
}

}  // namespace ancont
