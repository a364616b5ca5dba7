#pragma once

#include <array>
#include <vector>

namespace ueg {

// int_{C x C} |x-y|^{-1} over the unit cube, evaluated once by graded tensor
// quadrature (= 1.8823126...); D(1_C,1_C) is half of it.
double cube_self_interaction();
inline double cube_direct_term() { return 0.5 * cube_self_interaction(); }

// smeared pair potential v_CC(z) = (1/|.| * 1_C * 1_C)(z), s=1, d=3
double cube_pair_potential(const std::array<double, 3>& z);

// F(z) = 1/|z| - v_CC(z): point-pair energy minus smeared cube-pair energy.
// |F(z)| = O(|z|^{-4}); the sign is NOT definite (F > 0 along lattice axes,
// F < 0 along diagonals - the l=4 cubic anisotropy; 1/r is harmonic, not
// convex, away from the origin).
double lattice_potential_F(const std::array<double, 3>& z);

struct LatticeSumSpec {
    int cutoff = 0;          // lattice-vector cutoff R
    double sum_F = 0.0;      // sum over 0 < |z| <= R of F(z)
    double fitted_K = 0.0;   // max |F(z)| |z|^4 over the outermost shell
    double tail_bound = 0.0; // K * bound on sum_{|z|>R} |z|^{-4}
    double d_cc = 0.0;       // D(1_C,1_C)
};

LatticeSumSpec lattice_sum_spec(int cutoff_R);

struct FloatingCrystalResult {
    double e_fc = 0.0;        // per-volume upper bound for e_UEG at density 1
    double sum_F = 0.0;
    double tail_bound = 0.0;
    double fitted_K = 0.0;
    int cutoff = 0;
    double d_cc = 0.0;
    double spacing = 1.0;
    double density = 1.0;
};

// e_fc = 1/2 sum_{0<|z|<=R} F(z) - D(1_C,1_C) at unit density. For a lattice
// of spacing a with one smeared unit charge per cell, the per-volume energy
// at the corresponding density a^{-3} is rescaled back to density 1 through
// the exact rho^{4/3} law, so the result is spacing-independent.
// Throws when the fitted tail bound exceeds tail_target.
FloatingCrystalResult floating_crystal_upper_bound(int cutoff_R, double spacing = 1.0,
                                                   double tail_target = 1e300);

// Indirect energy of the finite floating-crystal block: p smeared unit
// charges at the given integer lattice positions, averaged over a common
// cell translation: E = sum_{j<k} F(r_j - r_k) - p D(1_C,1_C).
double finite_crystal_energy(const std::vector<std::array<double, 3>>& centers);

// n x n x n block of lattice sites, optionally with a one-cell corridor gap
// between sub-blocks of side `block` (the corridor layout of the trial-state
// construction; corridor = 0 gives the plain block).
std::vector<std::array<double, 3>> cubic_block_sites(int n);

} // namespace ueg
