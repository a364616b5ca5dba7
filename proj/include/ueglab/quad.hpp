#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace ueg {

// Gauss-Legendre nodes/weights on [-1,1].
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Newton iteration on Legendre polynomials; accurate to ~1e-15 for n <= 64.
inline GaussRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        r.w[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        r.w[n - 1 - i] = r.w[i];
    }
    return r;
}

// Piecewise Gauss nodes on [a,b] split at the given interior points.
// Kinks of the integrand must land on split points for spectral accuracy.
struct PanelRule {
    std::vector<double> x;
    std::vector<double> w;
};

inline PanelRule panel_gauss(double a, double b, std::vector<double> splits, int n_per_panel) {
    static thread_local int cached_n = -1;
    static thread_local GaussRule cached;
    if (cached_n != n_per_panel) {
        cached = gauss_legendre(n_per_panel);
        cached_n = n_per_panel;
    }
    splits.push_back(a);
    splits.push_back(b);
    std::sort(splits.begin(), splits.end());
    PanelRule rule;
    for (std::size_t k = 0; k + 1 < splits.size(); ++k) {
        double lo = splits[k], hi = splits[k + 1];
        if (!(lo >= a - 1e-14) || hi > b + 1e-14) continue;
        if (hi - lo < 1e-15) continue;
        for (int i = 0; i < n_per_panel; ++i) {
            rule.x.push_back(0.5 * (hi - lo) * cached.x[i] + 0.5 * (hi + lo));
            rule.w.push_back(0.5 * (hi - lo) * cached.w[i]);
        }
    }
    return rule;
}

// Dyadic split points accumulating towards `center`, used to resolve
// integrable singularities and kinks of |x - center|^alpha type factors.
inline std::vector<double> dyadic_splits(double a, double b, double center, int levels = 40) {
    std::vector<double> s;
    if (center > a && center < b) s.push_back(center);
    double span = b - a;
    for (int k = 1; k <= levels; ++k) {
        double h = span * std::pow(0.5, k);
        if (h < 1e-15 * span) break;
        if (center + h > a && center + h < b) s.push_back(center + h);
        if (center - h > a && center - h < b) s.push_back(center - h);
    }
    return s;
}

// Adaptive Simpson-like refinement built on 12-point Gauss panels. The
// per-panel error estimate compares one panel against its two halves.
inline double adaptive_gauss(const std::function<double(double)>& f, double a, double b,
                             double rel_tol = 1e-10, double abs_tol = 1e-13, int max_depth = 30) {
    static const GaussRule g = gauss_legendre(12);
    auto panel = [&](double lo, double hi) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.x.size(); ++i)
            s += g.w[i] * f(0.5 * (hi - lo) * g.x[i] + 0.5 * (hi + lo));
        return 0.5 * (hi - lo) * s;
    };
    struct Item {
        double a, b, whole;
        int depth;
    };
    std::vector<Item> stack{{a, b, panel(a, b), 0}};
    double total = 0.0;
    while (!stack.empty()) {
        Item it = stack.back();
        stack.pop_back();
        double m = 0.5 * (it.a + it.b);
        double left = panel(it.a, m), right = panel(m, it.b);
        double err = std::abs(left + right - it.whole);
        if (err < abs_tol + rel_tol * std::abs(left + right) || it.depth >= max_depth) {
            total += left + right;
        } else {
            stack.push_back({it.a, m, left, it.depth + 1});
            stack.push_back({m, it.b, right, it.depth + 1});
        }
    }
    return total;
}

} // namespace ueg
