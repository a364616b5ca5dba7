#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ueg {

// min c'x  s.t.  Ax = b, x >= 0, with b >= 0. Columns are accessed through
// callbacks so that structured column families (configuration spaces) never
// materialize a dense matrix. Redundant equality rows are tolerated
// (artificials may stay basic at zero).
struct LpProblem {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> rhs;
    std::function<double(std::size_t)> cost;
    // append (row, coeff) entries of column j
    std::function<void(std::size_t, std::vector<std::pair<std::size_t, double>>&)> column;
};

struct LpSolution {
    bool feasible = false;
    double value = 0.0;
    // basic structural columns with their values (artificials excluded)
    std::vector<std::pair<std::size_t, double>> basis;
    std::vector<double> dual; // y with c_j - y'A_j >= -tol at optimality
    long iterations = 0;
};

class LpError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Two-phase revised simplex, deterministic: Dantzig pricing with
// smallest-index tie-breaks, Bland's rule after a degenerate stretch,
// periodic refactorization of the basis inverse.
LpSolution solve_lp(const LpProblem& lp);

} // namespace ueg
