#include "ueglab/gc.hpp"
#include "ueglab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace ueg {

double GrandCanonicalState::total_weight() const {
    double w = 0.0;
    for (const auto& c : components) w += c.lambda;
    return w;
}

double GrandCanonicalState::mean_particle_number() const {
    double m = 0.0;
    for (const auto& c : components) m += c.lambda * c.n;
    return m;
}

GridDensity GrandCanonicalState::density() const {
    std::vector<double> masses(sites->size(), 0.0);
    for (const auto& c : components) {
        if (c.n == 0) continue;
        for (const auto& [cfg, w] : c.coupling.support)
            for (auto i : cfg) masses[i] += c.lambda * w;
    }
    return GridDensity(*sites, std::move(masses));
}

std::vector<double> GrandCanonicalState::number_law(int max_n) const {
    std::vector<double> law(max_n + 1, 0.0);
    for (const auto& c : components)
        if (c.n <= max_n) law[c.n] += c.lambda;
    return law;
}

GrandCanonicalState gc_vacuum(std::shared_ptr<const SiteGeometry> sites) {
    GrandCanonicalState out;
    out.sites = std::move(sites);
    Coupling empty;
    empty.n_particles = 0;
    empty.sites = out.sites;
    empty.support.emplace_back(std::vector<std::uint32_t>{}, 1.0);
    out.components.push_back({0, 1.0, std::move(empty)});
    return out;
}

GrandCanonicalState gc_from_coupling(const Coupling& P) {
    GrandCanonicalState out;
    out.sites = P.sites;
    out.components.push_back({P.n_particles, 1.0, P});
    return out;
}

double gc_interaction_energy(const GrandCanonicalState& P, const KernelMatrix& K) {
    double acc = 0.0;
    for (const auto& c : P.components)
        if (c.n >= 2) acc += c.lambda * interaction_energy(c.coupling, K);
    return acc;
}

GrandCanonicalState gc_tensor(const GrandCanonicalState& A, const GrandCanonicalState& B) {
    if (!A.sites->same_as(*B.sites))
        throw std::invalid_argument("gc_tensor: states must share a site set");
    std::map<int, std::vector<std::pair<double, Coupling>>> parts;
    for (const auto& ca : A.components)
        for (const auto& cb : B.components) {
            double lam = ca.lambda * cb.lambda;
            if (lam == 0.0) continue;
            parts[ca.n + cb.n].emplace_back(lam, tensor(ca.coupling, cb.coupling));
        }
    GrandCanonicalState out;
    out.sites = A.sites;
    for (auto& [n, list] : parts) {
        double lam = 0.0;
        for (auto& [w, c] : list) lam += w;
        Coupling merged;
        merged.n_particles = n;
        merged.sites = A.sites;
        for (auto& [w, c] : list)
            for (auto& [cfg, p] : c.support) merged.support.emplace_back(cfg, p * (w / lam));
        out.components.push_back({n, lam, std::move(merged)});
    }
    return out;
}

GrandCanonicalState localize(const Coupling& P, const std::vector<char>& in_region) {
    if (in_region.size() != P.sites->size())
        throw std::invalid_argument("localize: one flag per site required");
    std::map<int, std::vector<std::pair<std::vector<std::uint32_t>, double>>> comp;
    std::map<int, double> weight;
    for (const auto& [cfg, w] : P.support) {
        std::vector<std::uint32_t> inside;
        for (auto i : cfg)
            if (in_region[i]) inside.push_back(i);
        int n = static_cast<int>(inside.size());
        comp[n].emplace_back(std::move(inside), w);
        weight[n] += w;
    }
    GrandCanonicalState out;
    out.sites = P.sites;
    for (auto& [n, support] : comp) {
        double lam = weight[n];
        Coupling c;
        c.n_particles = n;
        c.sites = P.sites;
        for (auto& [cfg, w] : support) c.support.emplace_back(std::move(cfg), w / lam);
        out.components.push_back({n, lam, std::move(c)});
    }
    return out;
}

namespace {

struct GcColumns {
    // column j: particle count n_of[j], orbit entries start at offset, length n
    std::vector<int> n_of;
    std::vector<std::size_t> offset;
    std::vector<std::uint32_t> sites; // concatenated orbit site lists (active indices)
};

void enumerate_orbits(std::size_t m, int n, GcColumns& out) {
    if (n == 0) {
        out.n_of.push_back(0);
        out.offset.push_back(out.sites.size());
        return;
    }
    std::vector<std::uint32_t> cur(n, 0);
    for (;;) {
        out.n_of.push_back(n);
        out.offset.push_back(out.sites.size());
        out.sites.insert(out.sites.end(), cur.begin(), cur.end());
        int pos = n - 1;
        while (pos >= 0 && cur[pos] == m - 1) --pos;
        if (pos < 0) break;
        std::uint32_t v = ++cur[pos];
        for (int k = pos + 1; k < n; ++k) cur[k] = v;
    }
}

} // namespace

GcSolveResult gc_indirect_energy(const GridDensity& rho, int max_n, const KernelMatrix& K,
                                 const SolveOptions& opt) {
    const double mass = rho.total_mass();
    if (mass <= 0.0) throw std::invalid_argument("gc_indirect_energy: positive mass required");
    if (max_n <= 0) max_n = static_cast<int>(std::ceil(mass)) + 3;

    std::vector<std::uint32_t> act;
    std::vector<double> m;
    for (std::size_t i = 0; i < rho.size(); ++i)
        if (rho.mass(i) > 0.0) {
            act.push_back(static_cast<std::uint32_t>(i));
            m.push_back(rho.mass(i));
        }
    const std::size_t M = act.size();

    double configs = 1.0; // sum over n of M^n
    for (int n = 1; n <= max_n; ++n) configs += std::pow(static_cast<double>(M), n);
    if (configs > opt.budget)
        throw BudgetError("gc_indirect_energy: configuration count exceeds budget");

    GcColumns cols;
    for (int n = 0; n <= max_n; ++n) enumerate_orbits(M, n, cols);
    const std::size_t ncols = cols.n_of.size();

    auto orbit_cost = [&](std::size_t j) {
        int n = cols.n_of[j];
        const std::uint32_t* o = cols.sites.data() + cols.offset[j];
        double c = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) c += K(act[o[a]], act[o[b]]);
        return c;
    };

    LpProblem lp;
    lp.rows = M + 1; // site masses + total probability
    lp.cols = ncols;
    lp.rhs = m;
    lp.rhs.push_back(1.0);
    lp.cost = orbit_cost;
    lp.column = [&](std::size_t j, std::vector<std::pair<std::size_t, double>>& col) {
        int n = cols.n_of[j];
        const std::uint32_t* o = cols.sites.data() + cols.offset[j];
        for (int a = 0; a < n; ++a) {
            bool seen = false;
            for (int b = 0; b < a; ++b)
                if (o[b] == o[a]) { seen = true; break; }
            if (seen) continue;
            double mult = 0.0;
            for (int b = 0; b < n; ++b)
                if (o[b] == o[a]) mult += 1.0;
            col.emplace_back(o[a], mult);
        }
        col.emplace_back(M, 1.0);
    };

    LpSolution sol = solve_lp(lp);
    if (!sol.feasible)
        throw std::runtime_error("gc_indirect_energy: density constraints infeasible "
                                 "(max_n too small for the requested mass?)");

    const double D = direct_term(rho, rho, K);

    GcSolveResult out;
    out.report.method = "gc_exact_lp";
    out.report.direct = D;
    out.report.iterations = sol.iterations;
    out.report.primal_upper = sol.value - D;

    // dual certificate: y (sites) + y0 (normalization); worst violation shift on y0
    double min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < ncols; ++j) {
        int n = cols.n_of[j];
        const std::uint32_t* o = cols.sites.data() + cols.offset[j];
        double lhs = sol.dual[M];
        for (int a = 0; a < n; ++a) lhs += sol.dual[o[a]];
        min_slack = std::min(min_slack, orbit_cost(j) - lhs);
    }
    double dual_value = sol.dual[M];
    for (std::size_t i = 0; i < M; ++i) dual_value += sol.dual[i] * m[i];
    out.report.dual_shift = std::min(min_slack, 0.0);
    dual_value += out.report.dual_shift;
    out.report.dual_lower = dual_value - D;
    out.report.gap = out.report.primal_upper - out.report.dual_lower;

    // reconstruct the optimal mixture
    std::map<int, std::vector<std::pair<std::size_t, double>>> by_n;
    for (const auto& [j, q] : sol.basis) by_n[cols.n_of[j]].emplace_back(j, q);
    out.state.sites = std::make_shared<SiteGeometry>(rho.geometry());
    for (auto& [n, list] : by_n) {
        double lam = 0.0;
        for (auto& [j, q] : list) lam += q;
        Coupling c;
        c.n_particles = n;
        c.sites = out.state.sites;
        for (auto& [j, q] : list) {
            std::vector<std::uint32_t> cfg(cols.sites.data() + cols.offset[j],
                                           cols.sites.data() + cols.offset[j] + n);
            for (auto& v : cfg) v = act[v];
            std::sort(cfg.begin(), cfg.end());
            std::vector<std::vector<std::uint32_t>> perms;
            do {
                perms.push_back(cfg);
            } while (std::next_permutation(cfg.begin(), cfg.end()));
            for (auto& pc : perms) c.support.emplace_back(pc, q / lam / perms.size());
        }
        out.state.components.push_back({n, lam, std::move(c)});
    }
    return out;
}

GrandCanonicalState gc_product_trial(const GridDensity& rho, double max_support) {
    const double mass = rho.total_mass();
    if (mass <= 0.0) throw std::invalid_argument("gc_product_trial: positive mass required");
    const int n_hi = static_cast<int>(std::ceil(mass - 1e-12));
    const int n_lo = n_hi - 1;
    const double frac = mass - n_lo; // weight on the n_hi component
    auto sites = std::make_shared<SiteGeometry>(rho.geometry());

    auto product_state = [&](int n) {
        Coupling c;
        c.n_particles = n;
        c.sites = sites;
        if (n == 0) {
            c.support.emplace_back(std::vector<std::uint32_t>{}, 1.0);
            return c;
        }
        GridDensity unit = rho.scaled_masses(n / mass);
        return tensor_trial_coupling(unit, n, max_support);
    };

    GrandCanonicalState out;
    out.sites = sites;
    if (n_lo >= 0 && frac < 1.0) out.components.push_back({n_lo, 1.0 - frac, product_state(n_lo)});
    out.components.push_back({n_hi, frac, product_state(n_hi)});
    return out;
}

std::pair<std::vector<long>, long> rationalize_weights(const std::vector<double>& lambdas,
                                                       long q_max) {
    for (long q = 1; q <= q_max; ++q) {
        std::vector<long> p(lambdas.size());
        double err = 0.0;
        long sum = 0;
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            p[i] = std::lround(lambdas[i] * q);
            err = std::max(err, std::abs(lambdas[i] - static_cast<double>(p[i]) / q));
            sum += p[i];
        }
        if (sum == q && err < 1e-9) return {p, q};
    }
    throw std::invalid_argument("rationalize_weights: no denominator <= q_max found");
}

Coupling replicate_to_canonical(const GrandCanonicalState& P, long q,
                                const std::vector<std::vector<std::uint32_t>>& copy_sites,
                                std::shared_ptr<const SiteGeometry> big) {
    if (static_cast<long>(copy_sites.size()) != q)
        throw std::invalid_argument("replicate_to_canonical: need q copy maps");

    // expand components into the list Q_1..Q_q, repeating each P_n according
    // to its weight p_n/q
    std::vector<const GrandCanonicalState::Component*> reps;
    for (const auto& c : P.components) {
        double pn = c.lambda * q;
        long count = std::lround(pn);
        if (std::abs(pn - count) > 1e-9)
            throw std::invalid_argument("replicate_to_canonical: weights must be multiples of 1/q");
        for (long r = 0; r < count; ++r) reps.push_back(&c);
    }
    if (static_cast<long>(reps.size()) != q)
        throw std::invalid_argument("replicate_to_canonical: weights must sum to 1");

    std::vector<int> perm(q);
    std::iota(perm.begin(), perm.end(), 0);
    double qfact = 1.0;
    for (long i = 2; i <= q; ++i) qfact *= i;

    std::map<std::vector<std::uint32_t>, double> merged;
    do {
        // tensor product of reps[perm[k]] placed into copy k
        std::vector<std::pair<std::vector<std::uint32_t>, double>> acc{{{}, 1.0 / qfact}};
        for (long k = 0; k < q; ++k) {
            const auto& comp = *reps[perm[k]];
            std::vector<std::pair<std::vector<std::uint32_t>, double>> next;
            for (const auto& [base, wb] : acc)
                for (const auto& [cfg, wc] : comp.coupling.support) {
                    std::vector<std::uint32_t> ext = base;
                    for (auto i : cfg) ext.push_back(copy_sites[k][i]);
                    next.emplace_back(std::move(ext), wb * wc);
                }
            acc = std::move(next);
        }
        for (auto& [cfg, w] : acc) merged[cfg] += w;
    } while (std::next_permutation(perm.begin(), perm.end()));

    Coupling out;
    out.sites = std::move(big);
    out.n_particles = static_cast<int>(std::lround(P.mean_particle_number() * q));
    out.support.assign(merged.begin(), merged.end());
    return out;
}

} // namespace ueg
