#pragma once

#include "ueglab/riesz.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace ueg {

// Discrete N-particle probability on a site set: a sparse list of
// configurations (ordered site-index tuples) with probabilities.
struct Coupling {
    int n_particles = 0;
    std::shared_ptr<const SiteGeometry> sites;
    std::vector<std::pair<std::vector<std::uint32_t>, double>> support;

    double total_probability() const {
        double p = 0.0;
        for (const auto& [cfg, w] : support) p += w;
        return p;
    }
};

// rho_P: the sum of the N one-particle marginals; total mass = N * total prob.
GridDensity marginal_of(const Coupling& P);

// C(P) = sum_config prob * sum_{j<k} K(x_j, x_k)
double interaction_energy(const Coupling& P, const KernelMatrix& K);

// average over all permutations of each configuration; merges duplicates
Coupling symmetrize(const Coupling& P);

// concatenates particle lists: (P1 x P2)(x,y) = P1(x) P2(y)
Coupling tensor(const Coupling& A, const Coupling& B);

// (rho/N)^{tensor N}; its indirect energy equals -D(rho,rho)/N
Coupling tensor_trial_coupling(const GridDensity& rho, int N, double max_support = 1e6);

} // namespace ueg
