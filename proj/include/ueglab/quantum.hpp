#pragma once

#include "ueglab/riesz.hpp"

#include <optional>

namespace ueg {

struct TfDirac {
    double c_tf; // (3/5)(6 pi^2 / q)^{2/3}
    double c_d;  // (3/4)(6/(q pi))^{1/3}
};

TfDirac tf_dirac_constants(int q);

// Fermi-ball pair function: f(r) with fhat = indicator of |k| <= k_F(q),
// normalized so (2pi)^{-3/2} f(0) = 1/q (each of the q spin channels carries
// density rho/q).
double fermi_pair_function(double r, int q);

// exchange energy per volume of a sharp unit-density box of side L:
// q/(2 (2pi)^3) int |f(z)|^2/|z| * autocorr_box(z) dz / L^3  ->  c_D
double exchange_per_volume_box(double L, int q);

struct QuantumBoundReport {
    double hbar2 = 0.0;
    int q = 1;
    double kinetic = 0.0;       // hbar^2 int |grad sqrt(rho)|^2 (finite differences)
    double exchange = 0.0;      // the negative exchange double integral (positive number)
    double upper = 0.0;         // kinetic + hbar^2 c_TF int rho
    double refined_upper = 0.0; // upper - exchange
    double lower = 0.0;         // kinetic + classical lower bound
};

// A-priori sandwich for the quantum indirect energy of 0 <= rho <= 1 grids.
// classical_lower is E_0(rho) or a certified lower bound for it (an mmot dual
// value); when absent, the Lieb-Oxford bound -1.64 int rho^{4/3} is used.
QuantumBoundReport quasi_free_bound(const GridDensity& rho, double hbar2, int q,
                                    std::optional<double> classical_lower = std::nullopt);

} // namespace ueg
