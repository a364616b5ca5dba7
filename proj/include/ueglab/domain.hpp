#pragma once

#include "ueglab/riesz.hpp"

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace ueg {

// Bounded domains used for constant-density instances: cubes, balls, regular
// tetrahedra and finite disjoint unions of translated copies. All expose the
// exact volume, a bounding box, membership and distance-to-boundary.
class Domain {
public:
    virtual ~Domain() = default;
    virtual int dim() const = 0;
    virtual double volume() const = 0;
    virtual bool contains(const double* x) const = 0;
    // Euclidean distance to the boundary (valid inside and outside)
    virtual double boundary_distance(const double* x) const = 0;
    virtual void bounding_box(double* lo, double* hi) const = 0;
    virtual std::string describe() const = 0;
};

std::unique_ptr<Domain> make_cube(int d, double side, std::array<double, 3> center = {0, 0, 0});
std::unique_ptr<Domain> make_ball(int d, double radius, std::array<double, 3> center = {0, 0, 0});
// regular tetrahedron of the given volume, centered at the origin (d=3)
std::unique_ptr<Domain> make_regular_tetrahedron(double volume);
// disjoint union of translates of a base domain
std::unique_ptr<Domain> make_union(std::unique_ptr<Domain> base,
                                   std::vector<std::array<double, 3>> shifts);

// Uniform density rho0 * 1_Omega sampled on an n-per-axis grid over the
// bounding box. Partial cells get the covered fraction (4^d subsamples per
// cell), so total mass tracks rho0*|Omega| to well under 1% for n >= 8.
GridDensity discretize(const Domain& dom, int n_per_axis, double rho0 = 1.0);

// Fisher boundary-shell modulus |{d(x,dOmega) <= |Omega|^{1/d} t}| / |Omega|,
// measured on BOTH sides of the boundary (the definition does not say which
// side; the two-sided choice is recorded in the result metadata). Estimated
// with a fixed-seed Halton sample over an enlarged bounding box.
struct FisherEta {
    double t;
    double eta;            // shell volume / |Omega|
    double sampling_error; // rough 1-sigma estimate
    std::string shell_side; // "two-sided"
};

FisherEta fisher_eta(const Domain& dom, double t, std::size_t samples = 200000);

// rho_N(x) = rho(x / N^{1/d}): sites dilated by N^{1/d}, cell volume and
// masses multiplied by N, so total mass becomes N * (base mass).
struct ScaledFamily {
    GridDensity base;
    int d;
};

struct ScaledDensity {
    GridDensity density;
    bool integer_mass; // flagged, not enforced (grand-canonical consumers)
};

ScaledDensity scale_density(const ScaledFamily& family, double N);

} // namespace ueg
