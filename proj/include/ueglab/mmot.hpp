#pragma once

#include "ueglab/coupling.hpp"
#include "ueglab/errors.hpp"
#include "ueglab/riesz.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ueg {

enum class SolveMethod { exact_lp, entropic, trial_only };

std::string method_name(SolveMethod m);

struct SolveOptions {
    double budget = 1e7;          // max configuration count M^N
    int epsilon_levels = 12;      // entropic schedule eps_k = eps0 * 2^{-k}
    double epsilon0 = -1.0;       // <0: choose from the cost range
    double marginal_tol = 1e-8;   // total-variation stopping rule
    long max_sweeps = 200000;
};

// Primal/dual enclosure of E(rho) = inf C(P) - D(rho,rho). The dual side is a
// certified bound for the discretized LP: the potentials are shifted by the
// worst constraint violation (reported in dual_shift) before evaluation, so
// weak duality holds regardless of float error in the solve.
struct EnergyReport {
    double primal_upper = 0.0;
    double dual_lower = 0.0;
    double gap = 0.0;
    std::string method;
    long iterations = 0;
    double epsilon = 0.0;                  // final entropic temperature (0 for exact)
    std::vector<double> epsilon_schedule;
    double dual_shift = 0.0;               // feasibility correction applied to the duals
    bool converged = true;                 // false: best bounds returned with a warning
    std::optional<double> value_extrapolated; // entropic eps->0 Richardson value
    std::optional<Coupling> coupling;      // optimal coupling (exact_lp only)
    double direct = 0.0;                   // D(rho,rho) used in the report
};

// Indirect energy of a discretized density with integer total mass N.
EnergyReport indirect_energy(const GridDensity& rho, int N, const KernelMatrix& K,
                             SolveMethod method, const SolveOptions& opt = {});

EnergyReport indirect_energy(const GridDensity& rho, int N, const RieszKernel& kernel,
                             SolveMethod method, const SolveOptions& opt = {});

// -primal_upper / int rho^{1+s/d}
double lo_ratio(const GridDensity& rho, const EnergyReport& report, const RieszKernel& kernel);

} // namespace ueg
