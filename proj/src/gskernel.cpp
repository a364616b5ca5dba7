#include "ueglab/gskernel.hpp"
#include "ueglab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ueg {

namespace {

constexpr double kPi = 3.14159265358979323846;

// regular tetrahedron of unit volume centered at the origin
struct Tetra {
    std::array<std::array<double, 3>, 4> v;
    std::array<std::array<double, 3>, 4> normal; // inward
    std::array<double, 4> offset;
    double diameter;

    Tetra() {
        double t = std::cbrt(3.0 / 8.0);
        v = {{{t, t, t}, {t, -t, -t}, {-t, t, -t}, {-t, -t, t}}};
        diameter = 2.0 * std::sqrt(2.0) * t;
        for (int k = 0; k < 4; ++k) {
            const auto& a = v[(k + 1) % 4];
            const auto& b = v[(k + 2) % 4];
            const auto& c = v[(k + 3) % 4];
            std::array<double, 3> u{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
            std::array<double, 3> w{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
            std::array<double, 3> n{u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2],
                                    u[0] * w[1] - u[1] * w[0]};
            double nn = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
            for (auto& z : n) z /= nn;
            double sgn = n[0] * (v[k][0] - a[0]) + n[1] * (v[k][1] - a[1]) + n[2] * (v[k][2] - a[2]);
            if (sgn < 0.0)
                for (auto& z : n) z = -z;
            normal[k] = n;
            offset[k] = n[0] * a[0] + n[1] * a[1] + n[2] * a[2];
        }
    }

    bool contains(const double* x, double ell) const {
        for (int k = 0; k < 4; ++k)
            if (normal[k][0] * x[0] + normal[k][1] * x[1] + normal[k][2] * x[2] <
                ell * offset[k] - 0.0)
                return false;
        return true;
    }

    std::array<double, 3> sample(Rng& rng, double ell) const {
        double u[3] = {rng.uniform(), rng.uniform(), rng.uniform()};
        std::sort(u, u + 3);
        double w0 = u[0], w1 = u[1] - u[0], w2 = u[2] - u[1], w3 = 1.0 - u[2];
        return {ell * (w0 * v[0][0] + w1 * v[1][0] + w2 * v[2][0] + w3 * v[3][0]),
                ell * (w0 * v[0][1] + w1 * v[1][1] + w2 * v[2][1] + w3 * v[3][1]),
                ell * (w0 * v[0][2] + w1 * v[1][2] + w2 * v[2][2] + w3 * v[3][2])};
    }
};

const Tetra& unit_tetra() {
    static const Tetra t;
    return t;
}

void random_rotation(Rng& rng, double R[3][3]) {
    // uniform quaternion
    double q[4];
    double nn = 0.0;
    for (double& x : q) {
        x = rng.normal();
        nn += x * x;
    }
    nn = std::sqrt(nn);
    for (double& x : q) x /= nn;
    double w = q[0], x = q[1], y = q[2], z = q[3];
    R[0][0] = 1 - 2 * (y * y + z * z);
    R[0][1] = 2 * (x * y - z * w);
    R[0][2] = 2 * (x * z + y * w);
    R[1][0] = 2 * (x * y + z * w);
    R[1][1] = 1 - 2 * (x * x + z * z);
    R[1][2] = 2 * (y * z - x * w);
    R[2][0] = 2 * (x * z - y * w);
    R[2][1] = 2 * (y * z + x * w);
    R[2][2] = 1 - 2 * (x * x + y * y);
}

// counter-based derivation: every (stream, counter) pair gets an independent
// generator, so sampling order and thread layout cannot change the result
Rng derived_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    Rng mix(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    std::uint64_t s = mix.next_u64() ^ (0xbf58476d1ce4e5b9ULL * (counter + 1));
    return Rng(s);
}

} // namespace

double GSKernel::transform(double k) const {
    if (k <= 0.0) throw std::domain_error("GSKernel::transform: k > 0 required");
    // composite Simpson over the uniform radial grid
    const std::size_t n = r_grid.size();
    double integral = 0.0;
    const double dr = r_grid[1] - r_grid[0];
    for (std::size_t i = 0; i < n; ++i) {
        double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        integral += w * h[i] * std::sin(k * r_grid[i]);
    }
    integral *= dr / 3.0;
    return 4.0 * kPi / (k * k) - 4.0 * kPi / k * integral;
}

double GSKernel::transform_sigma(double k) const {
    const std::size_t n = r_grid.size();
    const double dr = r_grid[1] - r_grid[0];
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        double term = w * dr / 3.0 * sigma[i] * std::sin(k * r_grid[i]);
        var += term * term;
    }
    return 4.0 * kPi / k * std::sqrt(var);
}

GSKernel graf_schenker_kernel(double ell, std::size_t mc_samples, std::size_t radial_points,
                              std::uint64_t seed) {
    if (mc_samples < 10000)
        throw std::invalid_argument("graf_schenker_kernel: at least 1e4 samples required "
                                    "for the requested error bars");
    if (radial_points < 8 || radial_points % 2 == 0)
        throw std::invalid_argument("graf_schenker_kernel: radial_points must be odd and >= 9");
    const Tetra& T = unit_tetra();
    GSKernel out;
    out.ell = ell;
    out.seed = seed;
    out.mc_samples = mc_samples;
    out.support_radius = ell * T.diameter;
    out.r_grid.resize(radial_points);
    out.h.resize(radial_points);
    out.sigma.resize(radial_points);
    for (std::size_t i = 0; i < radial_points; ++i)
        out.r_grid[i] = out.support_radius * static_cast<double>(i) / (radial_points - 1);

    for (std::size_t i = 0; i < radial_points; ++i) {
        double r = out.r_grid[i];
        if (i == 0) {
            out.h[0] = 1.0; // the estimator is identically 1 at r = 0
            out.sigma[0] = 0.0;
            continue;
        }
        std::size_t hits = 0;
        for (std::size_t sct = 0; sct < mc_samples; ++sct) {
            Rng rng = derived_rng(seed, i, sct);
            auto w = T.sample(rng, ell);
            double R[3][3];
            random_rotation(rng, R);
            double x[3] = {w[0] + r * R[0][0], w[1] + r * R[1][0], w[2] + r * R[2][0]};
            if (T.contains(x, ell)) ++hits;
        }
        double p = static_cast<double>(hits) / mc_samples;
        out.h[i] = p;
        out.sigma[i] = std::sqrt(std::max(p * (1.0 - p), 1.0 / mc_samples) / mc_samples);
    }
    return out;
}

GSDiagnostics gs_positivity_check(const GSKernel& kernel, double k_lo, double k_hi,
                                  std::size_t nk) {
    GSDiagnostics diag;
    diag.h0 = kernel.h[0];
    diag.min_transform = 1e300;
    for (std::size_t i = 0; i < nk; ++i) {
        double k = k_lo + (k_hi - k_lo) * static_cast<double>(i) / (nk - 1);
        double t = kernel.transform(k);
        if (t < diag.min_transform) {
            diag.min_transform = t;
            diag.min_transform_k = k;
            diag.sigma_at_min = kernel.transform_sigma(k);
        }
    }
    diag.within_three_sigma = diag.min_transform >= -3.0 * diag.sigma_at_min;
    return diag;
}

GsLowerBoundReport gs_lower_bound(const GridDensity& rho, const Coupling* P, double ell,
                                  const KernelMatrix& K, std::size_t samples, std::uint64_t seed,
                                  const SolveOptions& opt) {
    const auto& geom = rho.geometry();
    if (geom.dim() != 3) throw std::invalid_argument("gs_lower_bound: d = 3 required");
    const Tetra& T = unit_tetra();

    // sampling box: support bounding box inflated by the circumscribed radius
    double lo[3] = {1e300, 1e300, 1e300}, hi[3] = {-1e300, -1e300, -1e300};
    for (std::size_t i = 0; i < geom.size(); ++i)
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], geom.site(i)[a]);
            hi[a] = std::max(hi[a], geom.site(i)[a]);
        }
    const double pad = ell * T.diameter;
    double box_vol = 1.0;
    for (int a = 0; a < 3; ++a) {
        lo[a] -= pad;
        hi[a] += pad;
        box_vol *= hi[a] - lo[a];
    }

    double acc = 0.0;
    std::vector<char> mask(geom.size());
    for (std::size_t sct = 0; sct < samples; ++sct) {
        Rng rng = derived_rng(seed, 9001, sct);
        double z[3] = {rng.uniform(lo[0], hi[0]), rng.uniform(lo[1], hi[1]),
                       rng.uniform(lo[2], hi[2])};
        double R[3][3];
        random_rotation(rng, R);
        bool any = false;
        for (std::size_t i = 0; i < geom.size(); ++i) {
            // local coordinates: R^T (x - z)
            double y[3], x[3];
            for (int a = 0; a < 3; ++a) y[a] = geom.site(i)[a] - z[a];
            for (int a = 0; a < 3; ++a) x[a] = R[0][a] * y[0] + R[1][a] * y[1] + R[2][a] * y[2];
            mask[i] = rho.mass(i) > 0.0 && T.contains(x, ell);
            any = any || mask[i];
        }
        if (!any) continue;
        std::vector<double> masses(geom.size(), 0.0);
        for (std::size_t i = 0; i < geom.size(); ++i)
            if (mask[i]) masses[i] = rho.mass(i);
        GridDensity local(geom, std::move(masses));
        if (local.total_mass() <= 0.0) continue;
        acc += gc_indirect_energy(local, 0, K, opt).report.primal_upper;
    }

    GsLowerBoundReport rep;
    rep.samples = samples;
    rep.localized_average = acc / samples * box_vol / 1.0; // |ell D| = ell^3
    rep.localized_average /= ell * ell * ell;

    const double Nn = rho.total_mass();
    if (P) {
        rep.has_lhs = true;
        rep.lhs = interaction_energy(*P, K) - direct_term(rho, rho, K);
        rep.c_hat = std::max(0.0, (rep.localized_average - rep.lhs) * ell / Nn);
    }
    rep.slack = rep.c_hat * Nn / ell;
    rep.value = rep.localized_average - rep.slack;
    return rep;
}

} // namespace ueg
