#pragma once

#include "ueglab/coupling.hpp"
#include "ueglab/mmot.hpp"

#include <memory>
#include <vector>

namespace ueg {

// Mixture over particle numbers: components (lambda_n, P_n) with lambda >= 0
// summing to 1. The n = 0 component (vacuum) has an empty coupling.
struct GrandCanonicalState {
    std::shared_ptr<const SiteGeometry> sites;
    // at most one component per particle number, sorted by n
    struct Component {
        int n;
        double lambda;
        Coupling coupling; // probability-normalized; empty support for n = 0
    };
    std::vector<Component> components;

    double total_weight() const;
    double mean_particle_number() const;
    GridDensity density() const;                 // sum_n lambda_n rho_{P_n}
    std::vector<double> number_law(int max_n) const;
};

GrandCanonicalState gc_vacuum(std::shared_ptr<const SiteGeometry> sites);
GrandCanonicalState gc_from_coupling(const Coupling& P);

// sum_n lambda_n C(P_n)
double gc_interaction_energy(const GrandCanonicalState& P, const KernelMatrix& K);

// component n of A (x) B is sum_k lambda_k lambda'_{n-k} P_k (x) P'_{n-k};
// the particle-number law is the convolution of the two laws and the density
// is additive
GrandCanonicalState gc_tensor(const GrandCanonicalState& A, const GrandCanonicalState& B);

// Localization of a canonical N-particle coupling to the site subset given by
// `in_region` (one flag per site). Component n collects, for every support
// configuration, the sub-tuple of particles inside the region with the full
// configuration probability; this reproduces the binomial-type restriction
// formula for symmetric couplings and conserves total probability exactly.
GrandCanonicalState localize(const Coupling& P, const std::vector<char>& in_region);

struct GcSolveResult {
    EnergyReport report;
    GrandCanonicalState state; // optimal mixture (exact solve)
};

// Grand-canonical indirect energy: joint LP over unnormalized component
// measures mu_n = lambda_n P_n (the standard lift; linear and exact), with
// density constraint sum_n rho_{mu_n} = rho and total probability 1.
// max_n <= 0 selects the default ceil(mass) + 3.
GcSolveResult gc_indirect_energy(const GridDensity& rho, int max_n, const KernelMatrix& K,
                                 const SolveOptions& opt = {});

// mixture of floor/ceil product states with density rho; an upper bound
// achieving E_GC <= -D(rho,rho)/ceil(mass) for mass >= 1
GrandCanonicalState gc_product_trial(const GridDensity& rho, double max_support = 1e6);

// rationalize weights to denominator q <= q_max (utility for the replication
// lemma tests); returns numerators p_n and q
std::pair<std::vector<long>, long> rationalize_weights(const std::vector<double>& lambdas,
                                                       long q_max = 10000);

// Replication: P grand-canonical with weights p_n/q on a region, q disjoint
// translated copies of the region (copy_sites[k][i] = index of region-site i
// in copy k inside `big`). Builds the permutation-symmetrized placement state
// whose restriction to each copy is P.
Coupling replicate_to_canonical(const GrandCanonicalState& P, long q,
                                const std::vector<std::vector<std::uint32_t>>& copy_sites,
                                std::shared_ptr<const SiteGeometry> big);

} // namespace ueg
