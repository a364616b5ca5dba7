#include "ueglab/monge1d.hpp"
#include "ueglab/quad.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ueg {

double Density1D::inverse_cdf(double m) const {
    if (m <= 0.0) return lo();
    if (m >= mass()) return hi();
    double a = lo(), b = hi();
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (a + b);
        if (cdf(mid) < m)
            a = mid;
        else
            b = mid;
        if (b - a < 1e-12 * std::max(1.0, std::abs(a) + std::abs(b))) break;
    }
    return 0.5 * (a + b);
}

StepDensity1D::StepDensity1D(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw std::invalid_argument("StepDensity1D: no pieces");
    std::sort(pieces_.begin(), pieces_.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
    cum_.assign(pieces_.size() + 1, 0.0);
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const Piece& p = pieces_[i];
        if (!(p.b > p.a) || p.h < 0.0) throw std::invalid_argument("StepDensity1D: bad piece");
        if (i > 0 && p.a < pieces_[i - 1].b - 1e-12)
            throw std::invalid_argument("StepDensity1D: overlapping pieces");
        cum_[i + 1] = cum_[i] + p.h * (p.b - p.a);
    }
    mass_ = cum_.back();
}

StepDensity1D StepDensity1D::uniform(double a, double b, double height) {
    return StepDensity1D({{a, b, height}});
}

double StepDensity1D::value(double x) const {
    for (const Piece& p : pieces_)
        if (x >= p.a && x < p.b) return p.h;
    return 0.0;
}

double StepDensity1D::cdf(double x) const {
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const Piece& p = pieces_[i];
        if (x <= p.a) return cum_[i];
        if (x < p.b) return cum_[i] + p.h * (x - p.a);
    }
    return mass_;
}

double StepDensity1D::inverse_cdf(double m) const {
    if (m <= 0.0) return lo();
    if (m >= mass_) return hi();
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        if (m <= cum_[i + 1]) {
            const Piece& p = pieces_[i];
            if (p.h <= 0.0) continue;
            return p.a + (m - cum_[i]) / p.h;
        }
    }
    return hi();
}

std::vector<double> StepDensity1D::kinks() const {
    std::vector<double> k;
    for (const Piece& p : pieces_) {
        k.push_back(p.a);
        k.push_back(p.b);
    }
    std::sort(k.begin(), k.end());
    k.erase(std::unique(k.begin(), k.end()), k.end());
    return k;
}

StepDensity1D StepDensity1D::dilated(double lambda) const {
    std::vector<Piece> p = pieces_;
    for (Piece& q : p) {
        q.a *= lambda;
        q.b *= lambda;
    }
    return StepDensity1D(std::move(p));
}

double StepDensity1D::pair_energy(double p) const {
    // g(t) = t^{2+p}/((1+p)(2+p)); int_I int_J |x-y|^p for disjoint I=[a,b],
    // J=[c,d] with c >= b is g(d-a)-g(d-b)-g(c-a)+g(c-b); same-interval case
    // integrates to 2 g(|I|) over both orderings.
    auto g = [p](double t) { return t > 0.0 ? std::pow(t, 2.0 + p) / ((1.0 + p) * (2.0 + p)) : 0.0; };
    double acc = 0.0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const Piece& I = pieces_[i];
        acc += 0.5 * I.h * I.h * 2.0 * g(I.b - I.a);
        for (std::size_t j = i + 1; j < pieces_.size(); ++j) {
            const Piece& J = pieces_[j];
            acc += I.h * J.h * (g(J.b - I.a) - g(J.b - I.b) - g(J.a - I.a) + g(J.a - I.b));
        }
    }
    return acc;
}

double StepDensity1D::power_integral(double p) const {
    double acc = 0.0;
    for (const Piece& q : pieces_)
        if (q.h > 0.0) acc += std::pow(q.h, p) * (q.b - q.a);
    return acc;
}

double StepDensity1D::potential(double x, double p) const {
    // int_a^b |x-y|^p dy with the antiderivative split at y = x
    auto seg = [p, x](double a, double b) {
        auto G = [p, x](double y) {
            // antiderivative of |x-y|^p in y
            double t = y - x;
            double v = std::pow(std::abs(t), p + 1.0) / (p + 1.0);
            return t >= 0.0 ? v : -v;
        };
        return G(b) - G(a);
    };
    double acc = 0.0;
    for (const Piece& q : pieces_) {
        if (q.h == 0.0) continue;
        if (x > q.a && x < q.b)
            acc += q.h * (seg(q.a, x) + seg(x, q.b));
        else
            acc += q.h * seg(q.a, q.b);
    }
    return acc;
}

std::vector<double> breakpoints(const Density1D& rho, int N) {
    if (N < 1) throw std::invalid_argument("breakpoints: N >= 1");
    double mass = rho.mass();
    if (std::abs(mass - N) > 1e-8 * std::max(1.0, mass))
        throw std::invalid_argument("breakpoints: total mass must equal N");
    std::vector<double> a;
    for (int k = 1; k < N; ++k) a.push_back(rho.inverse_cdf(static_cast<double>(k)));
    return a;
}

double monge_transport(const Density1D& rho, double y, int steps) {
    double target = rho.cdf(y) + steps;
    double mass = rho.mass();
    while (target > mass) target -= mass; // cyclic wrap on the last cell
    while (target < 0.0) target += mass;
    return rho.inverse_cdf(target);
}

namespace {

double monge_interaction(const Density1D& rho, int N, double s, int nodes_per_panel,
                         double* min_gap_out) {
    // integrate over the first cell only; T^j y = F^{-1}(F(y)+j) never wraps
    const double a0 = rho.lo();
    const double a1 = rho.inverse_cdf(1.0);

    // panel splits: preimages of density kinks under every T^j
    std::vector<double> splits;
    for (double b : rho.kinks()) {
        double cb = rho.cdf(b);
        for (int j = 0; j < N; ++j) {
            double m = cb - j;
            if (m > 0.0 && m < 1.0) splits.push_back(rho.inverse_cdf(m));
        }
    }
    PanelRule rule = panel_gauss(a0, a1, splits, nodes_per_panel);

    double min_gap = 1e300;
    double acc = 0.0;
    std::vector<double> pts(N);
    for (std::size_t q = 0; q < rule.x.size(); ++q) {
        double y = rule.x[q];
        double w = rule.w[q] * rho.value(y);
        if (w == 0.0) continue;
        double m0 = rho.cdf(y);
        for (int j = 0; j < N; ++j) pts[j] = rho.inverse_cdf(m0 + j);
        double c = 0.0;
        for (int j = 0; j < N; ++j)
            for (int k = j + 1; k < N; ++k) {
                double gap = pts[k] - pts[j];
                min_gap = std::min(min_gap, gap);
                c += std::pow(gap, -s);
            }
        acc += w * c;
    }
    if (min_gap_out) *min_gap_out = min_gap;
    return acc;
}

double direct_term_1d(const Density1D& rho, double s) {
    if (auto step = dynamic_cast<const StepDensity1D*>(&rho)) return step->pair_energy(-s);
    // generic: nested adaptive quadrature with the inner singularity split at x
    auto inner = [&](double x) {
        auto f = [&](double y) { return rho.value(y) * std::pow(std::abs(x - y), -s); };
        double lo = rho.lo(), hi = rho.hi();
        double v = 0.0;
        if (x > lo) v += adaptive_gauss(f, lo, std::min(x, hi), 1e-9, 1e-12);
        if (x < hi) v += adaptive_gauss(f, std::max(x, lo), hi, 1e-9, 1e-12);
        return v;
    };
    auto outer = [&](double x) { return rho.value(x) * inner(x); };
    return 0.5 * adaptive_gauss(outer, rho.lo(), rho.hi(), 1e-8, 1e-10);
}

} // namespace

Monge1DSolution indirect_energy_1d(const Density1D& rho, int N, double s) {
    if (!(s > 0.0 && s < 1.0)) throw std::domain_error("indirect_energy_1d: requires 0 < s < 1");
    double mass = rho.mass();
    if (std::abs(mass - N) > 1e-8 * std::max(1.0, mass))
        throw std::invalid_argument("indirect_energy_1d: total mass must equal N");

    Monge1DSolution sol;
    sol.s = s;
    sol.N = N;
    sol.breakpoints = breakpoints(rho, N);
    sol.direct = direct_term_1d(rho, s);
    if (N == 1) {
        sol.interaction = 0.0;
        sol.energy = -sol.direct;
        sol.min_gap = 1e300;
        return sol;
    }
    double gap12 = 0.0, gap24 = 0.0;
    double c12 = monge_interaction(rho, N, s, 12, &gap12);
    double c24 = monge_interaction(rho, N, s, 24, &gap24);
    if (!(gap24 > 0.0))
        throw std::runtime_error("indirect_energy_1d: transport collision (density not positive?)");
    sol.interaction = c24;
    sol.energy = c24 - sol.direct;
    sol.quadrature_error_estimate = std::abs(c24 - c12);
    sol.min_gap = gap24;
    return sol;
}

double lo_defect_1d(const std::vector<double>& config, const StepDensity1D& rho, double s_negative) {
    if (!(s_negative >= -1.0 && s_negative < 0.0))
        throw std::domain_error("lo_defect_1d: requires -1 <= s < 0");
    const double sigma = -s_negative;
    double mass = rho.mass();
    if (std::abs(mass - static_cast<double>(config.size())) > 1e-8 * std::max(1.0, mass))
        throw std::invalid_argument("lo_defect_1d: configuration size must equal the mass of rho");

    double pair = 0.0;
    for (std::size_t j = 0; j < config.size(); ++j)
        for (std::size_t k = j + 1; k < config.size(); ++k)
            pair += std::pow(std::abs(config[j] - config[k]), sigma);
    double cross = 0.0;
    for (double x : config) cross += rho.potential(x, sigma);
    double self = rho.pair_energy(sigma);
    return -pair + cross - self;
}

double lo_defect_1d(const std::vector<std::pair<std::vector<double>, double>>& coupling,
                    const StepDensity1D& rho, double s_negative) {
    double acc = 0.0, wsum = 0.0;
    for (const auto& [cfg, w] : coupling) {
        acc += w * lo_defect_1d(cfg, rho, s_negative);
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-8)
        throw std::invalid_argument("lo_defect_1d: coupling probabilities must sum to 1");
    return acc;
}

GridDensity discretize_1d(const Density1D& rho, int cells) {
    if (cells < 1) throw std::invalid_argument("discretize_1d: cells >= 1");
    double lo = rho.lo(), hi = rho.hi();
    double h = (hi - lo) / cells;
    std::vector<double> sites(cells), masses(cells);
    for (int i = 0; i < cells; ++i) {
        sites[i] = lo + (i + 0.5) * h;
        masses[i] = rho.cdf(lo + (i + 1) * h) - rho.cdf(lo + i * h);
    }
    return GridDensity(SiteGeometry(1, std::move(sites), h), std::move(masses));
}

} // namespace ueg
