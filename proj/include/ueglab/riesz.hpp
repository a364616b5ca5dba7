#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ueg {

// Riesz interaction |x-y|^{-s} in R^d, 0 < s < d. The cell-diagonal value is
// the exact pair-average of the kernel over one cubic cell against itself,
// which keeps D(f,f) a consistent Riemann approximation of the continuum
// double integral (two particles sharing a cell interact at the averaged
// strength, not at distance zero).
struct RieszKernel {
    double s;
    int d;

    RieszKernel(double s_, int d_) : s(s_), d(d_) {
        if (!(d >= 1 && d <= 3)) throw std::invalid_argument("RieszKernel: d must be 1..3");
        if (!(s > 0.0 && s < static_cast<double>(d)))
            throw std::domain_error("RieszKernel: requires 0 < s < d");
    }

    double operator()(double r) const { return std::pow(r, -s); }
};

// c_{d,s} = 2^{d-1-s} pi^{d/2} Gamma((d-s)/2) / Gamma(s/2)
inline double kernel_constant(double s, int d) {
    if (!(s > 0.0 && s < static_cast<double>(d)))
        throw std::domain_error("kernel_constant: requires 0 < s < d");
    const double pi = 3.14159265358979323846;
    double log_c = (d - 1.0 - s) * std::log(2.0) + 0.5 * d * std::log(pi)
                   + std::lgamma(0.5 * (d - s)) - std::lgamma(0.5 * s);
    return std::exp(log_c);
}

// Average of |x-y|^{-s} over a unit cell pair at integer offset `off`
// (cells [0,1)^d translated by off), for d = 1..3. offset 0 = the diagonal.
// Computed by tensor Gauss quadrature on the equivalent tent-weighted
// integral  int_{[-1,1]^d} prod_i(1-|t_i|) |t + off|^{-s} dt  with per-axis
// splits at the tent kinks and dyadic grading towards the singular point.
double unit_cell_pair_average(const RieszKernel& k, const std::vector<double>& off);

// Connects a site list to the cell-averaged kernel values used by both the
// direct term and the many-particle energy. Sites are cell centers of an
// implicit cubic-cell grid with cell side h = cell_volume^{1/d}.
class SiteGeometry {
public:
    SiteGeometry(int d, std::vector<double> sites_flat, double cell_volume);

    int dim() const { return d_; }
    std::size_t size() const { return n_; }
    double cell_volume() const { return cell_volume_; }
    double cell_side() const { return h_; }
    const double* site(std::size_t i) const { return sites_.data() + i * d_; }
    double distance(std::size_t i, std::size_t j) const;

    bool same_as(const SiteGeometry& other) const;

private:
    int d_;
    std::size_t n_;
    double cell_volume_;
    double h_;
    std::vector<double> sites_;
};

// Dense matrix of cell-pair averaged kernel values. Off-diagonal entries use
// the midpoint value when the separation exceeds two cell diameters and a
// 3^d-point tensor Gauss pair rule otherwise; the diagonal uses the
// high-order unit_cell_pair_average. All entries are finite and positive.
class KernelMatrix {
public:
    KernelMatrix(const RieszKernel& k, const SiteGeometry& geom);

    // explicit kernel table for synthetic test instances
    KernelMatrix(std::vector<double> values, std::size_t n);

    double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
    std::size_t size() const { return n_; }
    double max_offdiag() const;
    double diagonal_value() const { return values_.empty() ? 0.0 : values_[0]; }

private:
    std::size_t n_;
    std::vector<double> values_;
};

// Nonnegative masses on a site set; mass_i approximates the integral of the
// continuum density over cell i.
class GridDensity {
public:
    GridDensity(SiteGeometry geom, std::vector<double> masses);

    const SiteGeometry& geometry() const { return geom_; }
    const std::vector<double>& masses() const { return masses_; }
    double mass(std::size_t i) const { return masses_[i]; }
    double total_mass() const { return total_; }
    std::size_t size() const { return masses_.size(); }

    GridDensity scaled_masses(double factor) const;
    GridDensity plus(const GridDensity& other) const; // same geometry

    // quadrature of rho^p on the grid: sum (m_i/v)^p * v
    double power_integral(double p) const;

private:
    SiteGeometry geom_;
    std::vector<double> masses_;
    double total_;
};

// D(f,g) = 1/2 sum_ij f_i g_j K_ij, with the diagonal rule applied at i=j.
double direct_term(const GridDensity& f, const GridDensity& g, const KernelMatrix& K);

// convenience: builds the kernel matrix internally
double direct_term(const GridDensity& f, const GridDensity& g, const RieszKernel& k);

} // namespace ueg
