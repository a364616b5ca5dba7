#include "ueglab/quantum.hpp"
#include "ueglab/quad.hpp"

#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace ueg {

namespace {
constexpr double kPi = 3.14159265358979323846;

double fermi_momentum(int q) { return std::cbrt(6.0 * kPi * kPi / q); }
} // namespace

TfDirac tf_dirac_constants(int q) {
    if (q < 1) throw std::invalid_argument("tf_dirac_constants: q >= 1 required");
    TfDirac c;
    c.c_tf = 0.6 * std::pow(6.0 * kPi * kPi / q, 2.0 / 3.0);
    c.c_d = 0.75 * std::cbrt(6.0 / (q * kPi));
    return c;
}

double fermi_pair_function(double r, int q) {
    double kf = fermi_momentum(q);
    double t = kf * r;
    double pref = std::pow(2.0 * kPi, -1.5);
    if (t < 1e-4) {
        // sin t - t cos t = t^3/3 - t^5/30 + ...
        return pref * 4.0 * kPi * kf * kf * kf * (1.0 / 3.0 - t * t / 30.0);
    }
    return pref * (4.0 * kPi / (r * r * r)) * (std::sin(t) - t * std::cos(t));
}

double exchange_per_volume_box(double L, int q) {
    if (L <= 0.0) throw std::invalid_argument("exchange_per_volume_box: L > 0");
    const double kf = fermi_momentum(q);

    // angular average of the box autocorrelation prod_i (1-|z_i|/L)+ over the
    // sphere of radius r, octant product-Gauss (24^2 is ample for the smooth
    // product factor)
    static const GaussRule g = gauss_legendre(24);
    const int na = static_cast<int>(g.x.size());
    std::vector<double> sin_th(na), cos_th(na), wth(na), cph(na), sph(na), wph(na);
    for (int i = 0; i < na; ++i) {
        double th = 0.25 * kPi * (g.x[i] + 1.0);
        sin_th[i] = std::sin(th);
        cos_th[i] = std::cos(th);
        wth[i] = 0.25 * kPi * g.w[i];
        double ph = 0.25 * kPi * (g.x[i] + 1.0);
        cph[i] = std::cos(ph);
        sph[i] = std::sin(ph);
        wph[i] = 0.25 * kPi * g.w[i];
    }
    auto angular_avg = [&](double r) {
        double acc = 0.0;
        for (int i = 0; i < na; ++i)
            for (int j = 0; j < na; ++j) {
                double ux = sin_th[i] * cph[j], uy = sin_th[i] * sph[j], uz = cos_th[i];
                double a = (1.0 - r * std::abs(ux) / L);
                double b = (1.0 - r * std::abs(uy) / L);
                double c = (1.0 - r * std::abs(uz) / L);
                if (a > 0.0 && b > 0.0 && c > 0.0)
                    acc += wth[i] * wph[j] * sin_th[i] * a * b * c;
            }
        return 8.0 * acc; // full sphere by octant symmetry
    };

    // radial panels resolving the pi/kf oscillation of |f|^2
    const double rmax = std::sqrt(3.0) * L;
    const double panel = 0.5 * kPi / kf;
    const int npan = static_cast<int>(rmax / panel) + 1;
    static const GaussRule gr = gauss_legendre(10);
    double s = 0.0;
    for (int p = 0; p < npan; ++p) {
        double a = rmax * p / npan, b = rmax * (p + 1) / npan;
        for (std::size_t i = 0; i < gr.x.size(); ++i) {
            double r = 0.5 * (b - a) * gr.x[i] + 0.5 * (a + b);
            double w = 0.5 * (b - a) * gr.w[i];
            double f = fermi_pair_function(r, q);
            s += w * f * f * r * angular_avg(r); // (f^2/r) * r^2
        }
    }
    return q / (2.0 * std::pow(2.0 * kPi, 3.0)) * s;
}

QuantumBoundReport quasi_free_bound(const GridDensity& rho, double hbar2, int q,
                                    std::optional<double> classical_lower) {
    const auto& geom = rho.geometry();
    const int d = geom.dim();
    if (d != 3) throw std::invalid_argument("quasi_free_bound: d = 3 required");
    const double v = geom.cell_volume();
    const double h = geom.cell_side();

    // index the grid by integer lattice coordinates
    std::map<std::array<long, 3>, std::size_t> index;
    auto coord = [&](std::size_t i) {
        std::array<long, 3> c;
        for (int a = 0; a < 3; ++a) c[a] = std::lround(geom.site(i)[a] / h - 0.5);
        return c;
    };
    for (std::size_t i = 0; i < geom.size(); ++i) index[coord(i)] = i;

    std::vector<double> sqrt_rho(geom.size());
    for (std::size_t i = 0; i < geom.size(); ++i) {
        double val = rho.mass(i) / v;
        if (val > 1.0 + 1e-9)
            throw std::invalid_argument("quasi_free_bound: requires 0 <= rho <= 1 pointwise");
        sqrt_rho[i] = std::sqrt(std::max(val, 0.0));
    }

    // central differences where both neighbors exist; missing neighbors count
    // as vacuum (sqrt rho = 0)
    double kin = 0.0;
    for (std::size_t i = 0; i < geom.size(); ++i) {
        auto c = coord(i);
        double grad2 = 0.0;
        for (int a = 0; a < 3; ++a) {
            auto cp = c, cm = c;
            ++cp[a];
            --cm[a];
            auto itp = index.find(cp);
            auto itm = index.find(cm);
            double fp = itp != index.end() ? sqrt_rho[itp->second] : 0.0;
            double fm = itm != index.end() ? sqrt_rho[itm->second] : 0.0;
            double g = (fp - fm) / (2.0 * h);
            grad2 += g * g;
        }
        kin += grad2 * v;
    }

    // exchange double integral on the grid, diagonal via the cell-averaged
    // 1/r (the |f|^2 factor is smooth at 0)
    const RieszKernel coulomb(1.0, 3);
    double diag_avg = unit_cell_pair_average(coulomb, {0.0, 0.0, 0.0}) / h;
    double f0 = fermi_pair_function(0.0, q);
    double ex = 0.0;
    for (std::size_t i = 0; i < geom.size(); ++i) {
        if (rho.mass(i) == 0.0) continue;
        for (std::size_t j = 0; j < geom.size(); ++j) {
            if (rho.mass(j) == 0.0) continue;
            double term;
            if (i == j) {
                term = f0 * f0 * diag_avg;
            } else {
                double r = geom.distance(i, j);
                double f = fermi_pair_function(r, q);
                term = f * f / r;
            }
            ex += rho.mass(i) * rho.mass(j) * term;
        }
    }
    ex *= q / (2.0 * std::pow(2.0 * kPi, 3.0));

    TfDirac c = tf_dirac_constants(q);
    QuantumBoundReport rep;
    rep.hbar2 = hbar2;
    rep.q = q;
    rep.kinetic = hbar2 * kin;
    rep.upper = rep.kinetic + hbar2 * c.c_tf * rho.total_mass();
    rep.exchange = ex;
    rep.refined_upper = rep.upper - rep.exchange;
    double e0 = classical_lower ? *classical_lower : -1.64 * rho.power_integral(4.0 / 3.0);
    rep.lower = rep.kinetic + e0;
    return rep;
}

} // namespace ueg
