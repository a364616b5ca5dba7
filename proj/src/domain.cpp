#include "ueglab/domain.hpp"
#include "ueglab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ueg {

namespace {

class CubeDomain final : public Domain {
public:
    CubeDomain(int d, double side, std::array<double, 3> c) : d_(d), side_(side), c_(c) {}
    int dim() const override { return d_; }
    double volume() const override { return std::pow(side_, d_); }
    bool contains(const double* x) const override {
        for (int a = 0; a < d_; ++a)
            if (std::abs(x[a] - c_[a]) > 0.5 * side_) return false;
        return true;
    }
    double boundary_distance(const double* x) const override {
        // signed box distance, returned as |sdf|
        double inside_min = 1e300;
        double out2 = 0.0;
        bool outside = false;
        for (int a = 0; a < d_; ++a) {
            double q = std::abs(x[a] - c_[a]) - 0.5 * side_;
            if (q > 0.0) {
                outside = true;
                out2 += q * q;
            } else {
                inside_min = std::min(inside_min, -q);
            }
        }
        return outside ? std::sqrt(out2) : inside_min;
    }
    void bounding_box(double* lo, double* hi) const override {
        for (int a = 0; a < d_; ++a) {
            lo[a] = c_[a] - 0.5 * side_;
            hi[a] = c_[a] + 0.5 * side_;
        }
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "cube(d=" << d_ << ",side=" << side_ << ")";
        return os.str();
    }

private:
    int d_;
    double side_;
    std::array<double, 3> c_;
};

class BallDomain final : public Domain {
public:
    BallDomain(int d, double r, std::array<double, 3> c) : d_(d), r_(r), c_(c) {}
    int dim() const override { return d_; }
    double volume() const override {
        if (d_ == 1) return 2.0 * r_;
        if (d_ == 2) return 3.14159265358979323846 * r_ * r_;
        return 4.0 / 3.0 * 3.14159265358979323846 * r_ * r_ * r_;
    }
    bool contains(const double* x) const override { return radial(x) <= r_; }
    double boundary_distance(const double* x) const override { return std::abs(radial(x) - r_); }
    void bounding_box(double* lo, double* hi) const override {
        for (int a = 0; a < d_; ++a) {
            lo[a] = c_[a] - r_;
            hi[a] = c_[a] + r_;
        }
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "ball(d=" << d_ << ",radius=" << r_ << ")";
        return os.str();
    }

private:
    double radial(const double* x) const {
        double acc = 0.0;
        for (int a = 0; a < d_; ++a) acc += (x[a] - c_[a]) * (x[a] - c_[a]);
        return std::sqrt(acc);
    }
    int d_;
    double r_;
    std::array<double, 3> c_;
};

class TetraDomain final : public Domain {
public:
    explicit TetraDomain(double volume) : vol_(volume) {
        // vertices t*(1,1,1), t*(1,-1,-1), t*(-1,1,-1), t*(-1,-1,1); volume (8/3)t^3
        double t = std::cbrt(3.0 * volume / 8.0);
        v_ = {{{t, t, t}, {t, -t, -t}, {-t, t, -t}, {-t, -t, t}}};
        // inward face normals: face k = opposite vertex k
        for (int k = 0; k < 4; ++k) {
            const auto& a = v_[(k + 1) % 4];
            const auto& b = v_[(k + 2) % 4];
            const auto& c = v_[(k + 3) % 4];
            std::array<double, 3> u{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
            std::array<double, 3> w{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
            std::array<double, 3> n{u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2],
                                    u[0] * w[1] - u[1] * w[0]};
            double nn = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
            for (auto& z : n) z /= nn;
            // orient towards the opposite vertex
            double sgn = n[0] * (v_[k][0] - a[0]) + n[1] * (v_[k][1] - a[1]) + n[2] * (v_[k][2] - a[2]);
            if (sgn < 0.0)
                for (auto& z : n) z = -z;
            normals_[k] = n;
            offsets_[k] = n[0] * a[0] + n[1] * a[1] + n[2] * a[2];
        }
    }
    int dim() const override { return 3; }
    double volume() const override { return vol_; }
    bool contains(const double* x) const override {
        for (int k = 0; k < 4; ++k)
            if (plane_dist(k, x) < 0.0) return false;
        return true;
    }
    double boundary_distance(const double* x) const override {
        if (contains(x)) {
            double dmin = 1e300;
            for (int k = 0; k < 4; ++k) dmin = std::min(dmin, plane_dist(k, x));
            return dmin;
        }
        // outside: distance to the nearest point of any face triangle
        double dmin = 1e300;
        for (int k = 0; k < 4; ++k) {
            dmin = std::min(dmin, point_triangle(x, v_[(k + 1) % 4], v_[(k + 2) % 4], v_[(k + 3) % 4]));
        }
        return dmin;
    }
    void bounding_box(double* lo, double* hi) const override {
        for (int a = 0; a < 3; ++a) {
            lo[a] = 1e300;
            hi[a] = -1e300;
            for (const auto& v : v_) {
                lo[a] = std::min(lo[a], v[a]);
                hi[a] = std::max(hi[a], v[a]);
            }
        }
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "tetrahedron(volume=" << vol_ << ")";
        return os.str();
    }
    const std::array<std::array<double, 3>, 4>& vertices() const { return v_; }

private:
    double plane_dist(int k, const double* x) const {
        return normals_[k][0] * x[0] + normals_[k][1] * x[1] + normals_[k][2] * x[2] - offsets_[k];
    }
    static double point_triangle(const double* p, const std::array<double, 3>& a,
                                 const std::array<double, 3>& b, const std::array<double, 3>& c) {
        // classic closest-point-on-triangle
        auto sub = [](const std::array<double, 3>& u, const std::array<double, 3>& v) {
            return std::array<double, 3>{u[0] - v[0], u[1] - v[1], u[2] - v[2]};
        };
        auto dot = [](const std::array<double, 3>& u, const std::array<double, 3>& v) {
            return u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
        };
        std::array<double, 3> pp{p[0], p[1], p[2]};
        auto ab = sub(b, a), ac = sub(c, a), ap = sub(pp, a);
        double d1 = dot(ab, ap), d2 = dot(ac, ap);
        if (d1 <= 0 && d2 <= 0) return std::sqrt(dot(ap, ap));
        auto bp = sub(pp, b);
        double d3 = dot(ab, bp), d4 = dot(ac, bp);
        if (d3 >= 0 && d4 <= d3) return std::sqrt(dot(bp, bp));
        double vc = d1 * d4 - d3 * d2;
        if (vc <= 0 && d1 >= 0 && d3 <= 0) {
            double v = d1 / (d1 - d3);
            std::array<double, 3> q{a[0] + v * ab[0], a[1] + v * ab[1], a[2] + v * ab[2]};
            auto pq = sub(pp, q);
            return std::sqrt(dot(pq, pq));
        }
        auto cp = sub(pp, c);
        double d5 = dot(ab, cp), d6 = dot(ac, cp);
        if (d6 >= 0 && d5 <= d6) return std::sqrt(dot(cp, cp));
        double vb = d5 * d2 - d1 * d6;
        if (vb <= 0 && d2 >= 0 && d6 <= 0) {
            double w = d2 / (d2 - d6);
            std::array<double, 3> q{a[0] + w * ac[0], a[1] + w * ac[1], a[2] + w * ac[2]};
            auto pq = sub(pp, q);
            return std::sqrt(dot(pq, pq));
        }
        double va = d3 * d6 - d5 * d4;
        if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
            double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
            std::array<double, 3> bc = sub(c, b);
            std::array<double, 3> q{b[0] + w * bc[0], b[1] + w * bc[1], b[2] + w * bc[2]};
            auto pq = sub(pp, q);
            return std::sqrt(dot(pq, pq));
        }
        double denom = 1.0 / (va + vb + vc);
        double v = vb * denom, w = vc * denom;
        std::array<double, 3> q{a[0] + ab[0] * v + ac[0] * w, a[1] + ab[1] * v + ac[1] * w,
                                a[2] + ab[2] * v + ac[2] * w};
        auto pq = sub(pp, q);
        return std::sqrt(dot(pq, pq));
    }

    double vol_;
    std::array<std::array<double, 3>, 4> v_;
    std::array<std::array<double, 3>, 4> normals_;
    std::array<double, 4> offsets_;
};

class UnionDomain final : public Domain {
public:
    UnionDomain(std::unique_ptr<Domain> base, std::vector<std::array<double, 3>> shifts)
        : base_(std::move(base)), shifts_(std::move(shifts)) {}
    int dim() const override { return base_->dim(); }
    double volume() const override { return base_->volume() * shifts_.size(); }
    bool contains(const double* x) const override {
        double y[3];
        for (const auto& s : shifts_) {
            shift_into(x, s, y);
            if (base_->contains(y)) return true;
        }
        return false;
    }
    double boundary_distance(const double* x) const override {
        // copies are assumed disjoint, so the union boundary is the union of
        // the copy boundaries
        double dmin = 1e300;
        double y[3];
        for (const auto& s : shifts_) {
            shift_into(x, s, y);
            dmin = std::min(dmin, base_->boundary_distance(y));
        }
        return dmin;
    }
    void bounding_box(double* lo, double* hi) const override {
        double l0[3], h0[3];
        base_->bounding_box(l0, h0);
        for (int a = 0; a < dim(); ++a) {
            lo[a] = 1e300;
            hi[a] = -1e300;
        }
        for (const auto& s : shifts_)
            for (int a = 0; a < dim(); ++a) {
                lo[a] = std::min(lo[a], l0[a] + s[a]);
                hi[a] = std::max(hi[a], h0[a] + s[a]);
            }
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "union(" << base_->describe() << " x" << shifts_.size() << ")";
        return os.str();
    }

private:
    void shift_into(const double* x, const std::array<double, 3>& s, double* y) const {
        for (int a = 0; a < dim(); ++a) y[a] = x[a] - s[a];
    }
    std::unique_ptr<Domain> base_;
    std::vector<std::array<double, 3>> shifts_;
};

} // namespace

std::unique_ptr<Domain> make_cube(int d, double side, std::array<double, 3> center) {
    return std::make_unique<CubeDomain>(d, side, center);
}
std::unique_ptr<Domain> make_ball(int d, double radius, std::array<double, 3> center) {
    return std::make_unique<BallDomain>(d, radius, center);
}
std::unique_ptr<Domain> make_regular_tetrahedron(double volume) {
    return std::make_unique<TetraDomain>(volume);
}
std::unique_ptr<Domain> make_union(std::unique_ptr<Domain> base,
                                   std::vector<std::array<double, 3>> shifts) {
    return std::make_unique<UnionDomain>(std::move(base), std::move(shifts));
}

GridDensity discretize(const Domain& dom, int n_per_axis, double rho0) {
    const int d = dom.dim();
    double lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    dom.bounding_box(lo, hi);
    double span = 0.0;
    for (int a = 0; a < d; ++a) span = std::max(span, hi[a] - lo[a]);
    const double h = span / n_per_axis;
    const double cell_vol = std::pow(h, d);

    const int sub = 4; // 4^d coverage subsamples per cell
    std::vector<double> sites;
    std::vector<double> masses;
    int counts[3] = {1, 1, 1};
    for (int a = 0; a < d; ++a)
        counts[a] = static_cast<int>(std::ceil((hi[a] - lo[a]) / h - 1e-12));

    for (int i = 0; i < counts[0]; ++i) {
        for (int j = 0; j < (d >= 2 ? counts[1] : 1); ++j) {
            for (int l = 0; l < (d >= 3 ? counts[2] : 1); ++l) {
                double center[3] = {lo[0] + (i + 0.5) * h, lo[1] + (j + 0.5) * h,
                                    lo[2] + (l + 0.5) * h};
                int inside = 0, total = 1;
                for (int a = 0; a < d; ++a) total *= sub;
                for (int c = 0; c < total; ++c) {
                    int rem = c;
                    double p[3] = {center[0], center[1], center[2]};
                    for (int a = 0; a < d; ++a) {
                        int ia = rem % sub;
                        rem /= sub;
                        p[a] = center[a] + h * ((ia + 0.5) / sub - 0.5);
                    }
                    if (dom.contains(p)) ++inside;
                }
                if (inside == 0) continue;
                for (int a = 0; a < d; ++a) sites.push_back(center[a]);
                masses.push_back(rho0 * cell_vol * inside / total);
            }
        }
    }
    return GridDensity(SiteGeometry(d, std::move(sites), cell_vol), std::move(masses));
}

FisherEta fisher_eta(const Domain& dom, double t, std::size_t samples) {
    const int d = dom.dim();
    const double vol = dom.volume();
    const double shell = std::pow(vol, 1.0 / d) * t;

    double lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    dom.bounding_box(lo, hi);
    // enlarge the box to catch the outer shell
    double box_vol = 1.0;
    for (int a = 0; a < d; ++a) {
        lo[a] -= shell;
        hi[a] += shell;
        box_vol *= (hi[a] - lo[a]);
    }

    std::size_t hits = 0;
    static const unsigned primes[3] = {2, 3, 5};
    for (std::size_t n = 0; n < samples; ++n) {
        double p[3] = {0, 0, 0};
        for (int a = 0; a < d; ++a)
            p[a] = lo[a] + (hi[a] - lo[a]) * halton(n + 1, primes[a]);
        if (dom.boundary_distance(p) <= shell) ++hits;
    }
    double frac = static_cast<double>(hits) / samples;
    FisherEta out;
    out.t = t;
    out.eta = frac * box_vol / vol;
    out.sampling_error = std::sqrt(std::max(frac * (1.0 - frac), 1e-12) / samples) * box_vol / vol;
    out.shell_side = "two-sided";
    return out;
}

ScaledDensity scale_density(const ScaledFamily& family, double N) {
    if (N < 1.0) throw std::invalid_argument("scale_density: N >= 1 required");
    const int d = family.d;
    const double lam = std::pow(N, 1.0 / d);
    const auto& g = family.base.geometry();
    std::vector<double> sites(g.size() * d);
    for (std::size_t i = 0; i < g.size(); ++i)
        for (int a = 0; a < d; ++a) sites[i * d + a] = g.site(i)[a] * lam;
    std::vector<double> masses = family.base.masses();
    for (double& m : masses) m *= N;
    GridDensity out(SiteGeometry(d, std::move(sites), g.cell_volume() * N), std::move(masses));
    double total = out.total_mass();
    bool integer_mass = std::abs(total - std::round(total)) < 1e-9 * std::max(1.0, total);
    return ScaledDensity{std::move(out), integer_mass};
}

} // namespace ueg
