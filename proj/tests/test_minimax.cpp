#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "ancont/errors.hpp"
#include "ancont/minimax.hpp"
#include "support.hpp"

using namespace ancont;
namespace ts = testsupport;

namespace {
constexpr double kPi = std::numbers::pi;

int find_exponent(const std::vector<BasisElement>& basis, int k) {
    for (std::size_t j = 0; j < basis.size(); ++j)
        if (basis[j].exponent == k) return static_cast<int>(j);
    return -1;
}
}  // namespace

// Independent check of the expected ellipse value used below: the candidate
// phi(z) = ((a-b)/(a+b)) z has boundary residual of constant modulus
// 2ab/(a+b), worked out directly from the parametrization.
TEST_CASE("oracle: ellipse candidate has constant-modulus residual") {
    const double a = 2.0, b = 1.0;
    const Complex slope((a - b) / (a + b), 0.0);
    const double expected = 2.0 * a * b / (a + b);  // = 4/3
    for (int j = 0; j < 360; ++j) {
        const double th = 2.0 * kPi * j / 360.0;
        const Complex z(a * std::cos(th), b * std::sin(th));
        const Complex r = std::conj(z) - slope * z;
        CHECK(std::abs(r) == doctest::Approx(expected).epsilon(1e-13));
    }
    CHECK(expected == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
}

// The closed-form annulus minimizer phi = R1 R2 / z leaves a residual of
// constant modulus R1 - R2 on both boundary circles.
TEST_CASE("oracle: annulus closed form is equioscillating on both circles") {
    const double r1 = 2.0, r2 = 1.0;
    MinimaxResult closed;
    closed.coefficients = {Complex(r1 * r2, 0.0)};
    const std::vector<BasisElement> basis = {{{0.0, 0.0}, -1, 1.0}};

    for (double radius : {r1, r2}) {
        std::vector<Complex> pts;
        for (int j = 0; j < 512; ++j) pts.push_back(std::polar(radius, 2.0 * kPi * j / 512));
        const auto res = residual_field(closed, basis, pts);
        double lo = 1e300, hi = 0.0;
        for (Complex r : res) {
            lo = std::min(lo, std::abs(r));
            hi = std::max(hi, std::abs(r));
        }
        CHECK(hi - lo <= 1e-12);
        CHECK(hi == doctest::Approx(r1 - r2).epsilon(1e-13));
    }
}

TEST_CASE("build_basis: element inventory") {
    const auto disk_basis = build_basis(ts::disk(1.0), 2, 0);
    REQUIRE(disk_basis.size() == 3);
    for (int k = 0; k <= 2; ++k) CHECK(find_exponent(disk_basis, k) >= 0);

    const auto ann = build_basis(ts::annulus(2.0, 1.0), 2, 2);
    REQUIRE(ann.size() == 5);
    for (int k : {0, 1, 2, -1, -2}) CHECK(find_exponent(ann, k) >= 0);
    CHECK(ann[0].scale == doctest::Approx(2.0));       // outer max radius
    CHECK(ann.back().scale == doctest::Approx(1.0));   // hole mean radius

    const auto three = build_basis(ts::three_connected(), 1, 1);
    CHECK(three.size() == 4);  // {1, z} plus one pole per hole

    // poles silently skipped on simply connected domains
    CHECK(build_basis(ts::disk(1.0), 2, 5).size() == 3);

    CHECK_THROWS_AS(build_basis(ts::disk(1.0), 65, 0), ValidationError);
}

TEST_CASE("design_matrix: spot values") {
    BoundarySampling s;
    s.points = {Complex(0.0, 1.0), Complex(2.0, 0.0)};
    s.weights = {1.0, 1.0};
    s.component = {0, 0};
    s.tangents = {Complex(1.0, 0.0), Complex(1.0, 0.0)};
    s.params = {0.0, 1.0};
    const std::vector<BasisElement> basis = {
        {{0.0, 0.0}, 0, 1.0}, {{0.0, 0.0}, 1, 1.0}, {{0.0, 0.0}, -1, 1.0}};
    const auto a = design_matrix(basis, s);
    CHECK(std::abs(a(0, 0) - Complex(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(a(1, 0) - Complex(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(a(0, 1) - Complex(0.0, 1.0)) < 1e-15);
    CHECK(std::abs(a(1, 2) - Complex(0.5, 0.0)) < 1e-15);
}

TEST_CASE("lawson: disk with basis {1, z}") {
    const auto dom = ts::disk(1.0);
    const auto samples = sample_boundary(dom, 64);
    const std::vector<BasisElement> basis = {{{0.0, 0.0}, 0, 1.0}, {{0.0, 0.0}, 1, 1.0}};
    const auto res = lawson_minimax(samples, basis);
    CHECK(res.converged);
    CHECK(std::abs(res.lambda_hat - 1.0) <= 1e-4);
    CHECK(std::abs(res.coefficients[0]) <= 1e-6);
    CHECK(std::abs(res.coefficients[1]) <= 1e-6);
    CHECK(res.lower_bound <= res.lambda_hat);
    CHECK(res.equioscillation_ratio > 0.99);
    // lambda_hat is exactly the residual max
    double mx = 0.0;
    for (Complex r : res.residuals) mx = std::max(mx, std::abs(r));
    CHECK(res.lambda_hat == mx);
}

TEST_CASE("lawson: annulus recovers the rational minimizer") {
    const auto dom = ts::annulus(2.0, 1.0);
    const auto samples = sample_boundary(dom, 256);
    const auto basis = build_basis(dom, 4, 4);
    const auto res = lawson_minimax(samples, basis);
    CHECK(std::abs(res.lambda_hat - 1.0) <= 1e-3);
    const int jm1 = find_exponent(basis, -1);
    REQUIRE(jm1 >= 0);
    const Complex raw = unscaled_coefficient(basis[jm1], res.coefficients[jm1]);
    CHECK(std::abs(raw - Complex(2.0, 0.0)) <= 1e-3);
    for (std::size_t j = 0; j < basis.size(); ++j) {
        if (static_cast<int>(j) == jm1) continue;
        CHECK(std::abs(res.coefficients[j]) <= 1e-3);
    }
}

TEST_CASE("lawson: square lands strictly between the geometric bounds") {
    const auto dom = ts::square(2.0);
    const auto samples = sample_boundary(dom, 64);  // per edge
    const auto basis = build_basis(dom, 8, 0);
    const auto verification = verification_sampling(dom, samples);
    const auto res = lawson_minimax(samples, basis, {}, &verification);
    CHECK(res.lambda_hat > 1.0);
    CHECK(res.lambda_hat < 1.1285);
    CHECK(res.lower_bound <= res.lambda_hat);
}

TEST_CASE("lawson: error contracts") {
    const auto dom = ts::disk(1.0);
    const auto samples = sample_boundary(dom, 32);
    // duplicated element makes the design matrix rank deficient
    const std::vector<BasisElement> dup = {
        {{0.0, 0.0}, 0, 1.0}, {{0.0, 0.0}, 1, 1.0}, {{0.0, 0.0}, 1, 1.0}};
    CHECK_THROWS_AS(lawson_minimax(samples, dup), IllConditionedBasisError);

    // more basis elements than samples
    const auto tiny = sample_boundary(dom, 16);
    std::vector<BasisElement> wide;
    for (int k = 0; k <= 16; ++k) wide.push_back({{0.0, 0.0}, k, 1.0});
    CHECK_THROWS_AS(lawson_minimax(tiny, wide), ValidationError);
}

TEST_CASE("lp_crosscheck: disk and annulus windows") {
    const auto disk_samples = sample_boundary(ts::disk(1.0), 64);
    const std::vector<BasisElement> basis = {{{0.0, 0.0}, 0, 1.0}, {{0.0, 0.0}, 1, 1.0}};
    const auto lp = lp_crosscheck(disk_samples, basis, 64);
    CHECK(lp.lambda_lp >= 1.0 - 1e-9);
    CHECK(lp.lambda_lp <= 1.00125);

    const auto dom = ts::annulus(2.0, 1.0);
    const auto ann_samples = sample_boundary(dom, 128);
    const auto ann_basis = build_basis(dom, 4, 4);
    const auto lp2 = lp_crosscheck(ann_samples, ann_basis, 64);
    CHECK(lp2.lambda_lp >= 1.0 - 1e-9);
    CHECK(lp2.lambda_lp <= 1.0013);

    CHECK_THROWS_AS(lp_crosscheck(disk_samples, basis, 4), ValidationError);
}

TEST_CASE("lp_crosscheck: direction doubling shrinks the gap quadratically") {
    const auto samples = sample_boundary(ts::disk(1.0), 64);
    const std::vector<BasisElement> basis = {{{0.0, 0.0}, 0, 1.0}, {{0.0, 0.0}, 1, 1.0}};
    const auto res = lawson_minimax(samples, basis);
    const double gap16 = lp_crosscheck(samples, basis, 16).lambda_lp - res.lambda_hat;
    const double gap32 = lp_crosscheck(samples, basis, 32).lambda_lp - res.lambda_hat;
    REQUIRE(gap32 > 0.0);
    const double ratio = gap16 / gap32;
    CHECK(ratio > 2.5);
    CHECK(ratio < 6.0);
}

TEST_CASE("analytic_content: reference domains") {
    const auto ann = analytic_content(ts::annulus(3.0, 2.0));
    CHECK(std::abs(ann.lambda_hat - 1.0) <= 1e-3);
    CHECK(ann.converged);
    CHECK(!ann.ladder.empty());

    const auto ell = analytic_content(ts::ellipse(2.0, 1.0));
    CHECK(std::abs(ell.lambda_hat - 4.0 / 3.0) <= 2e-3);
    CHECK(ell.converged);

    const auto dsk = analytic_content(ts::disk(0.5));
    CHECK(std::abs(dsk.lambda_hat - 0.5) <= 1e-4);
}

TEST_CASE("sandwich: lawson and LP bracket the discrete optimum") {
    for (const auto& dom : {ts::annulus(2.0, 1.0), ts::ellipse(2.0, 1.0)}) {
        ContentOptions opt;
        opt.samples = 128;
        const auto res = analytic_content(dom, opt);
        CHECK(res.lower_bound <= res.lambda_hat);
        const auto lp = lp_crosscheck(res.samples, res.basis, 64);
        CHECK(res.lambda_hat * (1.0 - 1e-6) <= lp.lambda_lp);
        CHECK(lp.lambda_lp <= res.lambda_hat / std::cos(kPi / 64.0) + 1e-6);
    }
}

TEST_CASE("interior residuals stay below the boundary maximum") {
    // |conj(z) - phi|^2 is subharmonic, so the interior cannot beat the
    // boundary beyond discretization error.
    const auto dom = ts::annulus(2.0, 1.0);
    ContentOptions opt;
    opt.samples = 128;
    const auto res = analytic_content(dom, opt);
    const auto pts = interior_points(dom, 128, 20240817u);
    const auto vals = residual_field(res, res.basis, pts);
    for (Complex v : vals) CHECK(std::abs(v) <= res.lambda_hat * (1.0 + 5e-3));
}

TEST_CASE("enlarging the basis never hurts") {
    const auto dom = ts::ellipse(2.0, 1.0);
    const auto samples = sample_boundary(dom, 256);
    const auto verification = verification_sampling(dom, samples);
    const auto small = lawson_minimax(samples, build_basis(dom, 6, 0), {}, &verification);
    const auto big = lawson_minimax(samples, build_basis(dom, 12, 0), {}, &verification);
    CHECK(big.lambda_hat <= small.lambda_hat + 1e-6);
}

TEST_CASE("residual_field trivia") {
    MinimaxResult zero;
    zero.coefficients = {Complex(0.0, 0.0)};
    const std::vector<BasisElement> basis = {{{0.0, 0.0}, 0, 1.0}};
    const auto vals = residual_field(zero, basis, std::vector<Complex>{Complex(0.0, 0.0)});
    CHECK(std::abs(vals[0]) == 0.0);
}

// The dual-to-primal map flips the sign of the imaginary block. Domains with
// real-axis symmetry have real optimal coefficients and cannot see a mistake
// there, so both checks below use genuinely complex optima.
TEST_CASE("lp_crosscheck: rotated ellipse recovers the rotated coefficient") {
    const double rot = 0.5;
    const auto dom = ts::ellipse(2.0, 1.0, rot);
    const auto samples = sample_boundary(dom, 32);  // dense-path problem size
    const auto basis = build_basis(dom, 2, 0);
    const auto res = lawson_minimax(samples, basis);
    const auto lp = lp_crosscheck(samples, basis, 64);
    CHECK(res.lambda_hat * (1.0 - 1e-6) <= lp.lambda_lp);
    CHECK(lp.lambda_lp <= res.lambda_hat / std::cos(kPi / 64.0) + 1e-6);

    // the minimizer is exp(-2 i rot)/3 * z
    const Complex expect = std::exp(Complex(0.0, -2.0 * rot)) / 3.0;
    const int j = find_exponent(std::vector<BasisElement>(basis.begin(), basis.end()), 1);
    REQUIRE(j >= 0);
    CHECK(std::abs(unscaled_coefficient(basis[j], lp.coefficients[j]) - expect) <= 2e-2);
    CHECK(std::abs(unscaled_coefficient(basis[j], res.coefficients[j]) - expect) <= 2e-2);
}

TEST_CASE("lp_crosscheck: triangle certificate survives the working-set path") {
    const auto dom = ts::triangle(2.0);
    const auto samples = sample_boundary(dom, 48);  // 144 points x 64 directions
    const auto basis = build_basis(dom, 8, 0);
    const auto res = lawson_minimax(samples, basis);
    const auto lp = lp_crosscheck(samples, basis, 64);
    double lam_train = 0.0;
    for (Complex e : residual_field(res, res.basis, res.samples.points))
        lam_train = std::max(lam_train, std::abs(e));
    CHECK(lam_train <= lp.lambda_lp + 1e-6);
    CHECK(lp.lambda_lp <= lam_train / std::cos(kPi / 64.0) + 1e-6);
}
