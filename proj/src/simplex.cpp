#include "ancont/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "ancont/errors.hpp"

namespace ancont::lp {

namespace {

constexpr double kEnterTol = 1e-9;   // reduced cost must beat this to enter
constexpr double kPivotTol = 1e-11;  // minimum usable pivot magnitude

// Row-major dense tableau with the artificial identity block kept around for
// the whole run; its columns hold B^{-1}, which yields duals for free.
struct Tableau {
    int rows;
    int cols;       // real columns
    int width;      // cols + rows + 1 (artificials, then rhs)
    std::vector<double> t;
    std::vector<double> obj;  // reduced-cost row, width entries
    std::vector<int> basis;   // per row; >= cols means artificial; -1 inactive
    std::vector<char> active;

    Tableau(int r, int c) : rows(r), cols(c), width(c + r + 1), t(std::size_t(r) * width, 0.0),
                            obj(width, 0.0), basis(r), active(r, 1) {}

    double* row(int r) { return t.data() + std::size_t(r) * width; }
    double rhs(int r) const { return t[std::size_t(r) * width + width - 1]; }

    void pivot(int p, int j) {
        double* rp = row(p);
        const double inv = 1.0 / rp[j];
        for (int q = 0; q < width; ++q) rp[q] *= inv;
        rp[j] = 1.0;
        for (int r = 0; r < rows; ++r) {
            if (r == p || !active[r]) continue;
            double* rr = row(r);
            const double f = rr[j];
            if (f == 0.0) continue;
            for (int q = 0; q < width; ++q) rr[q] -= f * rp[q];
            rr[j] = 0.0;
            if (rr[width - 1] < 0.0 && rr[width - 1] > -1e-12) rr[width - 1] = 0.0;
        }
        const double f = obj[j];
        if (f != 0.0) {
            for (int q = 0; q < width; ++q) obj[q] -= f * rp[q];
            obj[j] = 0.0;
        }
        basis[p] = j;
    }

    // Dantzig pricing over real columns, Bland's rule when asked.
    int entering(bool bland) const {
        if (bland) {
            for (int j = 0; j < cols; ++j)
                if (obj[j] < -kEnterTol) return j;
            return -1;
        }
        int best = -1;
        double best_val = -kEnterTol;
        for (int j = 0; j < cols; ++j)
            if (obj[j] < best_val) {
                best_val = obj[j];
                best = j;
            }
        return best;
    }

    // Min-ratio row; among ties prefers kicking artificials out, then the
    // largest pivot magnitude for stability. In Bland mode ties resolve to
    // the smallest basis index instead: anti-cycling needs Bland's rule on
    // BOTH the entering and the leaving side, or degenerate problems (rhs
    // almost entirely zero) cycle forever.
    int leaving(int j, bool bland) const {
        int best = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        double best_pivot = 0.0;
        for (int r = 0; r < rows; ++r) {
            if (!active[r]) continue;
            const double a = t[std::size_t(r) * width + j];
            if (a <= kPivotTol) continue;
            const double ratio = rhs(r) / a;
            if (ratio < best_ratio - 1e-12) {
                best_ratio = ratio;
                best = r;
                best_pivot = a;
            } else if (ratio < best_ratio + 1e-12 && best >= 0) {
                if (bland) {
                    if (basis[r] < basis[best]) {
                        best = r;
                        best_pivot = a;
                    }
                    continue;
                }
                const bool cand_art = basis[r] >= cols, best_art = basis[best] >= cols;
                if (cand_art != best_art ? cand_art : a > best_pivot) {
                    best = r;
                    best_pivot = a;
                }
            }
        }
        return best;
    }
};

// stop_at: return as soon as the objective row value reaches it. Phase 1
// passes -(feasibility tolerance): once the artificial sum is zero the basis
// is feasible, and polishing phase-1 optimality is a pure degenerate grind.
int run_phase(Tableau& tab, int& iterations, int max_iterations,
              double stop_at = std::numeric_limits<double>::infinity()) {
    int stall = 0;
    double last_value = std::numeric_limits<double>::infinity();
    while (true) {
        if (tab.obj[tab.width - 1] >= stop_at) return 0;
        if (iterations++ > max_iterations)
            throw OracleFailureError("simplex iteration cap exceeded");
        const bool bland = stall > 64;
        const int j = tab.entering(bland);
        if (j < 0) return 0;
        const int p = tab.leaving(j, bland);
        if (p < 0) throw OracleFailureError("LP is unbounded");
        tab.pivot(p, j);
        const double value = tab.obj[tab.width - 1];
        if (value < last_value - 1e-13 * (1.0 + std::abs(value))) {
            stall = 0;
            last_value = value;
        } else {
            ++stall;
        }
    }
}

// With infeasible_out set, phase-1 failure reports through it instead of
// throwing; a working-set caller treats that as "not enough columns yet".
// seed: columns to pivot in before phase 1. A seed reproducing a previously
// optimal basis turns both phases into near no-ops, which is what makes the
// working-set rounds affordable on heavily degenerate problems.
Solution solve_dense(int rows, int cols,
                     const std::function<void(int, std::span<double>)>& fill_column,
                     std::span<const double> rhs, std::span<const double> cost,
                     int max_iterations, bool* infeasible_out = nullptr,
                     std::span<const int> seed = {}) {
    double rhs_scale = 1.0;
    for (double b : rhs) rhs_scale = std::max(rhs_scale, std::abs(b));

    Tableau tab(rows, cols);
    {
        std::vector<double> col(rows);
        for (int j = 0; j < cols; ++j) {
            fill_column(j, col);
            for (int r = 0; r < rows; ++r) tab.row(r)[j] = col[r];
        }
        for (int r = 0; r < rows; ++r) {
            tab.row(r)[cols + r] = 1.0;
            tab.row(r)[tab.width - 1] = rhs[r];
            tab.basis[r] = cols + r;
        }
    }

    // Min-ratio pivots restricted to artificial rows keep rhs >= 0 and never
    // evict an earlier seed column.
    for (int j : seed) {
        if (j < 0 || j >= cols) continue;
        int best = -1;
        double best_ratio = std::numeric_limits<double>::infinity(), best_a = 0.0;
        for (int r = 0; r < rows; ++r) {
            if (tab.basis[r] < cols) continue;
            const double a = tab.row(r)[j];
            if (a <= kPivotTol) continue;
            const double ratio = tab.rhs(r) / a;
            if (ratio < best_ratio - 1e-12 ||
                (ratio < best_ratio + 1e-12 && a > best_a)) {
                best_ratio = ratio;
                best = r;
                best_a = a;
            }
        }
        if (best >= 0) tab.pivot(best, j);
    }

    int iterations = 0;

    // Phase 1: minimize the sum of artificials still in the basis; their
    // reduced costs are -(current tableau column sums over those rows).
    for (int q = 0; q < tab.width; ++q) {
        double s = 0.0;
        for (int r = 0; r < rows; ++r)
            if (tab.basis[r] >= cols) s += tab.row(r)[q];
        tab.obj[q] = (q >= cols && q < cols + rows) ? 0.0 : -s;
    }
    run_phase(tab, iterations, max_iterations, -1e-9 * rhs_scale);

    double infeasibility = 0.0;
    for (int r = 0; r < rows; ++r)
        if (tab.basis[r] >= cols) infeasibility += tab.rhs(r);
    if (infeasibility > 1e-7 * rhs_scale) {
        if (!infeasible_out) throw OracleFailureError("LP is infeasible");
        *infeasible_out = true;
        Solution sol;
        sol.iterations = iterations;
        return sol;
    }
    if (infeasible_out) *infeasible_out = false;

    // Drive leftover artificials out; rows with no real pivot are redundant.
    for (int r = 0; r < rows; ++r) {
        if (tab.basis[r] < cols) continue;
        int j = -1;
        for (int q = 0; q < cols; ++q)
            if (std::abs(tab.row(r)[q]) > 1e-7) {
                j = q;
                break;
            }
        if (j >= 0)
            tab.pivot(r, j);
        else {
            tab.active[r] = 0;
            tab.basis[r] = -1;
        }
    }

    // Phase 2 objective from the real costs.
    std::fill(tab.obj.begin(), tab.obj.end(), 0.0);
    for (int q = 0; q < cols; ++q) tab.obj[q] = cost[q];
    for (int r = 0; r < rows; ++r) {
        if (!tab.active[r]) continue;
        const double cb = cost[tab.basis[r]];
        if (cb == 0.0) continue;
        const double* rr = tab.row(r);
        for (int q = 0; q < tab.width; ++q) tab.obj[q] -= cb * rr[q];
    }
    run_phase(tab, iterations, max_iterations);

    Solution sol;
    sol.iterations = iterations;
    sol.primal.assign(cols, 0.0);
    sol.dual.assign(rows, 0.0);
    sol.objective = 0.0;
    for (int r = 0; r < rows; ++r)
        if (tab.active[r] && tab.basis[r] >= 0 && tab.basis[r] < cols)
            sol.basic.push_back(tab.basis[r]);

    std::vector<int> act;
    act.reserve(rows);
    for (int r = 0; r < rows; ++r)
        if (tab.active[r]) act.push_back(r);
    const int m = static_cast<int>(act.size());

    // Recompute primal, duals, and objective from a fresh factorization of the
    // final basis: the tableau's accumulated roundoff is unfit for
    // certificate-grade duals.
    bool refreshed = false;
    if (m > 0) {
        Eigen::MatrixXd basis_mat(m, m);
        Eigen::VectorXd cb(m), b(m);
        std::vector<double> col(rows);
        for (int p = 0; p < m; ++p) {
            const int j = tab.basis[act[p]];
            fill_column(j, col);
            for (int q = 0; q < m; ++q) basis_mat(q, p) = col[act[q]];
            cb[p] = cost[j];
            b[p] = rhs[act[p]];
        }
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_mat);
        const Eigen::VectorXd xb = lu.solve(b);
        const Eigen::VectorXd y = lu.transpose().solve(cb);
        const double res_p = (basis_mat * xb - b).cwiseAbs().maxCoeff();
        const double res_d = (basis_mat.transpose() * y - cb).cwiseAbs().maxCoeff();
        if (xb.allFinite() && y.allFinite() &&
            res_p <= 1e-7 * (1.0 + b.cwiseAbs().maxCoeff()) &&
            res_d <= 1e-7 * (1.0 + cb.cwiseAbs().maxCoeff())) {
            for (int p = 0; p < m; ++p) {
                sol.primal[tab.basis[act[p]]] = std::max(0.0, xb[p]);
                sol.dual[act[p]] = y[p];
            }
            sol.objective = cb.dot(xb);
            refreshed = true;
        }
    }

    if (!refreshed) {
        // tableau fallback: duals off the artificial block,
        // y_r = sum_r' c_B[r'] (B^{-1})[r'][r]
        for (int r = 0; r < rows; ++r)
            if (tab.active[r] && tab.basis[r] >= 0 && tab.basis[r] < cols)
                sol.primal[tab.basis[r]] = std::max(0.0, tab.rhs(r));
        for (int q = 0; q < cols; ++q) sol.objective += cost[q] * sol.primal[q];
        for (int rp = 0; rp < rows; ++rp) {
            if (!tab.active[rp]) continue;
            const double cb = cost[tab.basis[rp]];
            if (cb == 0.0) continue;
            const double* rr = tab.row(rp);
            for (int r = 0; r < rows; ++r) sol.dual[r] += cb * rr[cols + r];
        }
    }
    return sol;
}

// Width at which the dense tableau gives way to a working-set (sifting)
// scheme: solve on a column subset, price the rest against the duals, pull
// violators in, repeat. Equivalent optimum, but pivoting never touches the
// full width.
constexpr int kSiftWidth = 2048;

}  // namespace

Solution solve_standard_form(int rows, int cols,
                             const std::function<void(int, std::span<double>)>& fill_column,
                             std::span<const double> rhs, std::span<const double> cost,
                             int max_iterations) {
    if (rows <= 0 || cols <= 0) throw OracleFailureError("empty LP");
    if (static_cast<int>(rhs.size()) != rows || static_cast<int>(cost.size()) != cols)
        throw OracleFailureError("LP dimension mismatch");
    for (double b : rhs)
        if (b < 0.0) throw OracleFailureError("standard-form rhs must be nonnegative");

    if (cols <= kSiftWidth)
        return solve_dense(rows, cols, fill_column, rhs, cost, max_iterations);

    double cost_scale = 1.0;
    for (double c : cost) cost_scale = std::max(cost_scale, std::abs(c));
    const double price_tol = kEnterTol * cost_scale;

    // Golden-ratio stepping with the step coprime to cols: visits every
    // column exactly once per full cycle and never aligns with periodic
    // column structure (any divisor of cols is coprime to the step too).
    long long step = std::max(1LL, static_cast<long long>(cols * 0.6180339887498949));
    while (std::gcd(step, static_cast<long long>(cols)) != 1) ++step;

    std::vector<int> work;
    std::vector<char> in_work(cols, 0);
    long long cursor = 0;
    int drawn = 0;
    const auto draw = [&](int want) {
        while (want > 0 && drawn < cols) {
            const int q = static_cast<int>(cursor % cols);
            cursor += step;
            ++drawn;
            if (in_work[q]) continue;
            in_work[q] = 1;
            work.push_back(q);
            --want;
        }
    };
    draw(std::max(64, 8 * rows));

    std::vector<double> colbuf(rows);
    std::vector<double> sub_cost;
    std::vector<int> seed;  // previous round's basis; work[] is append-only so
                            // sub-problem positions stay valid across rounds
    int iterations_total = 0;
    for (int round = 0; round < 64; ++round) {
        sub_cost.resize(work.size());
        for (std::size_t i = 0; i < work.size(); ++i) sub_cost[i] = cost[work[i]];
        const auto sub_fill = [&](int jw, std::span<double> out) { fill_column(work[jw], out); };
        bool infeasible = false;
        Solution sub = solve_dense(rows, static_cast<int>(work.size()), sub_fill, rhs, sub_cost,
                                   max_iterations - iterations_total, &infeasible, seed);
        iterations_total += sub.iterations;
        seed = sub.basic;
        if (infeasible) {
            // the subset cannot balance the rows yet; only a full working set
            // makes infeasibility a verdict on the LP itself
            if (static_cast<int>(work.size()) == cols) throw OracleFailureError("LP is infeasible");
            draw(std::max(256, 8 * rows));
            continue;
        }

        struct Violation {
            double reduced;
            int column;
        };
        std::vector<Violation> violations;
        for (int q = 0; q < cols; ++q) {
            if (in_work[q]) continue;
            fill_column(q, colbuf);
            double reduced = cost[q];
            for (int r = 0; r < rows; ++r) reduced -= sub.dual[r] * colbuf[r];
            if (reduced < -price_tol) violations.push_back({reduced, q});
        }
        if (violations.empty()) {
            std::vector<double> primal(cols, 0.0);
            for (std::size_t i = 0; i < work.size(); ++i) primal[work[i]] = sub.primal[i];
            sub.primal = std::move(primal);
            for (int& j : sub.basic) j = work[j];
            sub.iterations = iterations_total;
            return sub;
        }

        const int add_cap = std::max(64, 2 * rows);
        if (static_cast<int>(violations.size()) > add_cap) {
            std::nth_element(violations.begin(), violations.begin() + add_cap, violations.end(),
                             [](const Violation& u, const Violation& v) {
                                 return u.reduced < v.reduced;
                             });
            violations.resize(add_cap);
        }
        for (const Violation& v : violations) {
            in_work[v.column] = 1;
            work.push_back(v.column);
        }
    }
    throw OracleFailureError("working-set LP failed to close");
}

}  // namespace ancont::lp
