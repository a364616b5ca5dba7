#include "ueglab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ueg {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kFeasTol = 1e-10;
constexpr long kMaxIterations = 2000000;

struct Tableau {
    std::size_t m;                     // rows
    std::vector<std::size_t> basic;    // basic column per row; >= art_base means artificial
    std::vector<double> binv;          // m x m dense inverse of the basis
    std::vector<double> xb;            // current basic values
    std::size_t art_base;              // artificial columns start at this index

    double binv_at(std::size_t i, std::size_t j) const { return binv[i * m + j]; }
};

} // namespace

LpSolution solve_lp(const LpProblem& lp) {
    const std::size_t m = lp.rows;
    const std::size_t n = lp.cols;
    for (double b : lp.rhs)
        if (b < -1e-12) throw LpError("solve_lp: rhs must be nonnegative");

    Tableau t;
    t.m = m;
    t.art_base = n;
    t.basic.resize(m);
    t.binv.assign(m * m, 0.0);
    t.xb = lp.rhs;
    for (std::size_t i = 0; i < m; ++i) {
        t.basic[i] = n + i; // artificial i
        t.binv[i * m + i] = 1.0;
    }

    std::vector<std::pair<std::size_t, double>> col;
    auto load_column = [&](std::size_t j, std::vector<double>& dense) {
        std::fill(dense.begin(), dense.end(), 0.0);
        if (j >= n) {
            dense[j - n] = 1.0;
        } else {
            col.clear();
            lp.column(j, col);
            for (auto& [r, v] : col) dense[r] += v;
        }
    };

    std::vector<double> aj(m), d(m), y(m), cb(m);
    long iterations = 0;

    auto refactorize = [&]() {
        // rebuild binv by Gauss-Jordan on the basis matrix
        std::vector<double> mat(m * m, 0.0), inv(m * m, 0.0);
        std::vector<double> dense(m);
        for (std::size_t c = 0; c < m; ++c) {
            load_column(t.basic[c], dense);
            for (std::size_t r = 0; r < m; ++r) mat[r * m + c] = dense[r];
            inv[c * m + c] = 1.0;
        }
        for (std::size_t c = 0; c < m; ++c) {
            std::size_t piv = c;
            for (std::size_t r = c + 1; r < m; ++r)
                if (std::abs(mat[r * m + c]) > std::abs(mat[piv * m + c])) piv = r;
            if (std::abs(mat[piv * m + c]) < 1e-14) throw LpError("solve_lp: singular basis");
            if (piv != c) {
                for (std::size_t k = 0; k < m; ++k) {
                    std::swap(mat[piv * m + k], mat[c * m + k]);
                    std::swap(inv[piv * m + k], inv[c * m + k]);
                }
            }
            double p = mat[c * m + c];
            for (std::size_t k = 0; k < m; ++k) {
                mat[c * m + k] /= p;
                inv[c * m + k] /= p;
            }
            for (std::size_t r = 0; r < m; ++r) {
                if (r == c) continue;
                double f = mat[r * m + c];
                if (f == 0.0) continue;
                for (std::size_t k = 0; k < m; ++k) {
                    mat[r * m + k] -= f * mat[c * m + k];
                    inv[r * m + k] -= f * inv[c * m + k];
                }
            }
        }
        t.binv = std::move(inv);
        // refresh xb
        for (std::size_t i = 0; i < m; ++i) {
            double acc = 0.0;
            for (std::size_t k = 0; k < m; ++k) acc += t.binv_at(i, k) * lp.rhs[k];
            t.xb[i] = acc;
        }
    };

    auto run_phase = [&](bool phase1) {
        long degenerate_run = 0;
        int since_refactor = 0;
        auto column_cost = [&](std::size_t j) -> double {
            if (phase1) return j >= n ? 1.0 : 0.0;
            return j >= n ? 0.0 : lp.cost(j);
        };
        for (;;) {
            if (++iterations > kMaxIterations) throw LpError("solve_lp: iteration limit");
            // duals y = cB' * Binv
            for (std::size_t i = 0; i < m; ++i) cb[i] = column_cost(t.basic[i]);
            for (std::size_t k = 0; k < m; ++k) {
                double acc = 0.0;
                for (std::size_t i = 0; i < m; ++i) acc += cb[i] * t.binv_at(i, k);
                y[k] = acc;
            }
            // pricing over structural columns (artificials may not re-enter)
            const bool bland = degenerate_run > 400;
            std::size_t enter = n;
            double best = -1e-9;
            for (std::size_t j = 0; j < n; ++j) {
                col.clear();
                lp.column(j, col);
                double r = column_cost(j);
                for (auto& [row, v] : col) r -= y[row] * v;
                if (r < -1e-9) {
                    if (bland) {
                        enter = j;
                        break;
                    }
                    if (r < best) {
                        best = r;
                        enter = j;
                    }
                }
            }
            if (enter == n) return; // optimal for this phase
            // direction d = Binv * A_enter
            load_column(enter, aj);
            for (std::size_t i = 0; i < m; ++i) {
                double acc = 0.0;
                for (std::size_t k = 0; k < m; ++k) acc += t.binv_at(i, k) * aj[k];
                d[i] = acc;
            }
            // ratio test; prefer kicking artificials out on ties
            std::size_t leave = m;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m; ++i) {
                if (d[i] > kPivotTol) {
                    double ratio = t.xb[i] / d[i];
                    bool better = ratio < best_ratio - 1e-12;
                    bool tie = std::abs(ratio - best_ratio) <= 1e-12;
                    if (better ||
                        (tie && leave < m &&
                         ((t.basic[i] >= n && t.basic[leave] < n) ||
                          ((t.basic[i] >= n) == (t.basic[leave] >= n) && t.basic[i] < t.basic[leave])))) {
                        best_ratio = ratio;
                        leave = i;
                    }
                }
            }
            if (leave == m) throw LpError("solve_lp: unbounded");
            if (best_ratio < 1e-12) ++degenerate_run;
            else degenerate_run = 0;
            // pivot: update binv and xb
            double piv = d[leave];
            for (std::size_t k = 0; k < m; ++k) t.binv[leave * m + k] /= piv;
            t.xb[leave] /= piv;
            for (std::size_t i = 0; i < m; ++i) {
                if (i == leave) continue;
                double f = d[i];
                if (f == 0.0) continue;
                for (std::size_t k = 0; k < m; ++k) t.binv[i * m + k] -= f * t.binv[leave * m + k];
                t.xb[i] -= f * t.xb[leave];
            }
            t.basic[leave] = enter;
            if (++since_refactor >= 64) {
                refactorize();
                since_refactor = 0;
            }
        }
    };

    run_phase(true);
    // phase-1 objective = sum of artificial values
    double art_sum = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        if (t.basic[i] >= n) art_sum += std::abs(t.xb[i]);
    LpSolution out;
    double bscale = 1.0;
    for (double b : lp.rhs) bscale = std::max(bscale, std::abs(b));
    if (art_sum > kFeasTol * bscale * 10.0) {
        out.feasible = false;
        return out;
    }
    refactorize();
    run_phase(false);
    refactorize();

    out.feasible = true;
    out.iterations = iterations;
    out.value = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (t.basic[i] < n && t.xb[i] > 1e-14) {
            out.basis.emplace_back(t.basic[i], t.xb[i]);
            out.value += lp.cost(t.basic[i]) * t.xb[i];
        }
    }
    std::sort(out.basis.begin(), out.basis.end());
    // final duals
    for (std::size_t i = 0; i < m; ++i) cb[i] = t.basic[i] < n ? lp.cost(t.basic[i]) : 0.0;
    out.dual.assign(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += cb[i] * t.binv_at(i, k);
        out.dual[k] = acc;
    }
    return out;
}

} // namespace ueg
