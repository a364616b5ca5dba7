#include "ueglab/riesz.hpp"
#include "ueglab/quad.hpp"

#include <algorithm>
#include <cmath>

namespace ueg {

namespace {

// tent-weighted nodes on [-1,1] for one axis: kinks at 0 and (graded) at -z
void tent_axis_nodes(double z, int n_per_panel, std::vector<double>& x, std::vector<double>& w) {
    std::vector<double> splits{0.0};
    if (z >= -1.2 && z <= 1.2) {
        auto extra = dyadic_splits(-1.0, 1.0, -z, 14);
        splits.insert(splits.end(), extra.begin(), extra.end());
    }
    PanelRule rule = panel_gauss(-1.0, 1.0, splits, n_per_panel);
    x = std::move(rule.x);
    w = std::move(rule.w);
}

} // namespace

double unit_cell_pair_average(const RieszKernel& k, const std::vector<double>& off) {
    const int d = k.d;
    const int n = 12;
    std::vector<std::vector<double>> xs(d), ws(d);
    for (int a = 0; a < d; ++a) tent_axis_nodes(off[a], n, xs[a], ws[a]);

    double total = 0.0;
    if (d == 1) {
        for (std::size_t i = 0; i < xs[0].size(); ++i) {
            double t = off[0] + xs[0][i];
            total += ws[0][i] * (1.0 - std::abs(xs[0][i])) * std::pow(std::abs(t), -k.s);
        }
    } else if (d == 2) {
        for (std::size_t i = 0; i < xs[0].size(); ++i) {
            double wi = ws[0][i] * (1.0 - std::abs(xs[0][i]));
            double ti = off[0] + xs[0][i];
            for (std::size_t j = 0; j < xs[1].size(); ++j) {
                double tj = off[1] + xs[1][j];
                double r = std::sqrt(ti * ti + tj * tj);
                total += wi * ws[1][j] * (1.0 - std::abs(xs[1][j])) * std::pow(r, -k.s);
            }
        }
    } else {
        for (std::size_t i = 0; i < xs[0].size(); ++i) {
            double wi = ws[0][i] * (1.0 - std::abs(xs[0][i]));
            double ti = off[0] + xs[0][i];
            for (std::size_t j = 0; j < xs[1].size(); ++j) {
                double wj = wi * ws[1][j] * (1.0 - std::abs(xs[1][j]));
                double tj = off[1] + xs[1][j];
                for (std::size_t l = 0; l < xs[2].size(); ++l) {
                    double tl = off[2] + xs[2][l];
                    double r = std::sqrt(ti * ti + tj * tj + tl * tl);
                    total += wj * ws[2][l] * (1.0 - std::abs(xs[2][l])) * std::pow(r, -k.s);
                }
            }
        }
    }
    return total;
}

SiteGeometry::SiteGeometry(int d, std::vector<double> sites_flat, double cell_volume)
    : d_(d), cell_volume_(cell_volume), sites_(std::move(sites_flat)) {
    if (d_ < 1 || d_ > 3) throw std::invalid_argument("SiteGeometry: d must be 1..3");
    if (cell_volume_ <= 0.0) throw std::invalid_argument("SiteGeometry: cell_volume <= 0");
    if (sites_.size() % d_ != 0) throw std::invalid_argument("SiteGeometry: bad site array");
    n_ = sites_.size() / d_;
    h_ = std::pow(cell_volume_, 1.0 / d_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i + 1; j < n_; ++j)
            if (distance(i, j) < 1e-12 * h_)
                throw std::invalid_argument("SiteGeometry: sites must be pairwise distinct");
}

double SiteGeometry::distance(std::size_t i, std::size_t j) const {
    double acc = 0.0;
    for (int a = 0; a < d_; ++a) {
        double t = sites_[i * d_ + a] - sites_[j * d_ + a];
        acc += t * t;
    }
    return std::sqrt(acc);
}

bool SiteGeometry::same_as(const SiteGeometry& other) const {
    if (d_ != other.d_ || n_ != other.n_) return false;
    if (std::abs(cell_volume_ - other.cell_volume_) > 1e-12 * cell_volume_) return false;
    for (std::size_t i = 0; i < sites_.size(); ++i)
        if (std::abs(sites_[i] - other.sites_[i]) > 1e-9 * (1.0 + std::abs(sites_[i]))) return false;
    return true;
}

KernelMatrix::KernelMatrix(const RieszKernel& k, const SiteGeometry& geom) : n_(geom.size()) {
    values_.assign(n_ * n_, 0.0);
    const double h = geom.cell_side();
    const double diam = h * std::sqrt(static_cast<double>(geom.dim()));

    // diagonal: exact unit-cell self average, scaled to cell side h
    double diag = unit_cell_pair_average(k, std::vector<double>(geom.dim(), 0.0)) * std::pow(h, -k.s);

    static const GaussRule g3 = gauss_legendre(3);
    const int d = geom.dim();

    for (std::size_t i = 0; i < n_; ++i) {
        values_[i * n_ + i] = diag;
        for (std::size_t j = i + 1; j < n_; ++j) {
            double r = geom.distance(i, j);
            double v;
            if (r > 2.0 * diam) {
                v = std::pow(r, -k.s);
            } else {
                // 3^d-point tensor Gauss rule per cell, averaged over the pair
                double acc = 0.0, wacc = 0.0;
                std::vector<int> idx(2 * d, 0);
                const int total = [&] {
                    int t = 1;
                    for (int a = 0; a < 2 * d; ++a) t *= 3;
                    return t;
                }();
                for (int c = 0; c < total; ++c) {
                    int rem = c;
                    double w = 1.0;
                    double diff2 = 0.0;
                    for (int a = 0; a < d; ++a) {
                        int ia = rem % 3; rem /= 3;
                        int ja = rem % 3; rem /= 3;
                        double xa = geom.site(i)[a] + 0.5 * h * g3.x[ia];
                        double ya = geom.site(j)[a] + 0.5 * h * g3.x[ja];
                        w *= 0.25 * g3.w[ia] * g3.w[ja];
                        double t = xa - ya;
                        diff2 += t * t;
                    }
                    acc += w * std::pow(diff2, -0.5 * k.s);
                    wacc += w;
                }
                v = acc / wacc;
            }
            values_[i * n_ + j] = v;
            values_[j * n_ + i] = v;
        }
    }
}

KernelMatrix::KernelMatrix(std::vector<double> values, std::size_t n) : n_(n), values_(std::move(values)) {
    if (values_.size() != n_ * n_) throw std::invalid_argument("KernelMatrix: bad table size");
}

double KernelMatrix::max_offdiag() const {
    double m = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            if (i != j) m = std::max(m, values_[i * n_ + j]);
    return m;
}

GridDensity::GridDensity(SiteGeometry geom, std::vector<double> masses)
    : geom_(std::move(geom)), masses_(std::move(masses)) {
    if (masses_.size() != geom_.size())
        throw std::invalid_argument("GridDensity: one mass per site required");
    total_ = 0.0;
    for (double m : masses_) {
        if (m < 0.0) throw std::invalid_argument("GridDensity: masses must be >= 0");
        total_ += m;
    }
}

GridDensity GridDensity::scaled_masses(double factor) const {
    std::vector<double> m = masses_;
    for (double& x : m) x *= factor;
    return GridDensity(geom_, std::move(m));
}

GridDensity GridDensity::plus(const GridDensity& other) const {
    if (!geom_.same_as(other.geom_))
        throw std::invalid_argument("GridDensity::plus: mismatched geometries");
    std::vector<double> m = masses_;
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += other.masses_[i];
    return GridDensity(geom_, std::move(m));
}

double GridDensity::power_integral(double p) const {
    const double v = geom_.cell_volume();
    double acc = 0.0;
    for (double m : masses_)
        if (m > 0.0) acc += std::pow(m / v, p) * v;
    return acc;
}

double direct_term(const GridDensity& f, const GridDensity& g, const KernelMatrix& K) {
    if (f.size() != K.size() || g.size() != K.size())
        throw std::invalid_argument("direct_term: mismatched geometries");
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f.mass(i) == 0.0) continue;
        double row = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) row += g.mass(j) * K(i, j);
        acc += f.mass(i) * row;
    }
    return 0.5 * acc;
}

double direct_term(const GridDensity& f, const GridDensity& g, const RieszKernel& k) {
    if (!f.geometry().same_as(g.geometry()))
        throw std::invalid_argument("direct_term: mismatched geometries");
    KernelMatrix K(k, f.geometry());
    return direct_term(f, g, K);
}

} // namespace ueg
