#include "ueglab/coupling.hpp"
#include "ueglab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace ueg {

GridDensity marginal_of(const Coupling& P) {
    std::vector<double> masses(P.sites->size(), 0.0);
    for (const auto& [cfg, w] : P.support)
        for (auto i : cfg) masses[i] += w;
    return GridDensity(*P.sites, std::move(masses));
}

double interaction_energy(const Coupling& P, const KernelMatrix& K) {
    double acc = 0.0;
    for (const auto& [cfg, w] : P.support) {
        double c = 0.0;
        for (std::size_t a = 0; a < cfg.size(); ++a)
            for (std::size_t b = a + 1; b < cfg.size(); ++b) c += K(cfg[a], cfg[b]);
        acc += w * c;
    }
    return acc;
}

Coupling symmetrize(const Coupling& P) {
    std::map<std::vector<std::uint32_t>, double> merged;
    for (const auto& [cfg, w] : P.support) {
        std::vector<std::uint32_t> perm = cfg;
        std::sort(perm.begin(), perm.end());
        // distribute over the distinct permutations of the sorted tuple
        std::vector<std::vector<std::uint32_t>> perms;
        do {
            perms.push_back(perm);
        } while (std::next_permutation(perm.begin(), perm.end()));
        double share = w / perms.size();
        for (auto& q : perms) merged[q] += share;
    }
    Coupling out;
    out.n_particles = P.n_particles;
    out.sites = P.sites;
    out.support.assign(merged.begin(), merged.end());
    return out;
}

Coupling tensor(const Coupling& A, const Coupling& B) {
    if (A.sites && B.sites && !A.sites->same_as(*B.sites))
        throw std::invalid_argument("tensor: couplings must share a site set");
    Coupling out;
    out.n_particles = A.n_particles + B.n_particles;
    out.sites = A.sites ? A.sites : B.sites;
    out.support.reserve(A.support.size() * B.support.size());
    for (const auto& [ca, wa] : A.support)
        for (const auto& [cb, wb] : B.support) {
            std::vector<std::uint32_t> cfg = ca;
            cfg.insert(cfg.end(), cb.begin(), cb.end());
            out.support.emplace_back(std::move(cfg), wa * wb);
        }
    return out;
}

Coupling tensor_trial_coupling(const GridDensity& rho, int N, double max_support) {
    if (N < 1) throw std::invalid_argument("tensor_trial_coupling: N >= 1");
    const double mass = rho.total_mass();
    if (std::abs(mass - N) > 1e-6 * std::max(1.0, mass))
        throw std::invalid_argument("tensor_trial_coupling: total mass must equal N");

    std::vector<std::uint32_t> active;
    for (std::size_t i = 0; i < rho.size(); ++i)
        if (rho.mass(i) > 0.0) active.push_back(static_cast<std::uint32_t>(i));
    double count = std::pow(static_cast<double>(active.size()), N);
    if (count > max_support) throw BudgetError("tensor_trial_coupling: support too large");

    Coupling out;
    out.n_particles = N;
    out.sites = std::make_shared<SiteGeometry>(rho.geometry());
    std::vector<std::uint32_t> idx(N, 0);
    for (;;) {
        std::vector<std::uint32_t> cfg(N);
        double w = 1.0;
        for (int a = 0; a < N; ++a) {
            cfg[a] = active[idx[a]];
            w *= rho.mass(cfg[a]) / mass;
        }
        out.support.emplace_back(std::move(cfg), w);
        int pos = N - 1;
        while (pos >= 0 && ++idx[pos] == active.size()) idx[pos--] = 0;
        if (pos < 0) break;
    }
    return out;
}

} // namespace ueg
