#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ancont::lp {

struct Solution {
    double objective = 0.0;
    std::vector<double> primal;  // size cols
    std::vector<double> dual;    // size rows; satisfies cost_q - dual.E_q >= 0, = 0 on basis
    std::vector<int> basic;      // terminal basis columns (degenerate ones included)
    int iterations = 0;
};

// Dense two-phase tableau simplex for
//     minimize cost.mu  subject to  E mu = rhs, mu >= 0,
// with rhs >= 0. Columns of E are materialized on demand through fill_column
// so callers never hold a second copy of a wide constraint matrix; wide
// problems are solved by a working-set scheme that prices the full column
// range against sub-problem duals. Columns should be roughly unit-scaled;
// equilibrate before calling. Primal, duals, and objective are recomputed
// from a fresh factorization of the final basis.
// Throws OracleFailureError on infeasibility, unboundedness, or overrun.
Solution solve_standard_form(int rows, int cols,
                             const std::function<void(int, std::span<double>)>& fill_column,
                             std::span<const double> rhs, std::span<const double> cost,
                             int max_iterations = 200000);

}  // namespace ancont::lp
