#include "ueglab/mmot.hpp"
#include "ueglab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ueg {

std::string method_name(SolveMethod m) {
    switch (m) {
        case SolveMethod::exact_lp: return "exact_lp";
        case SolveMethod::entropic: return "entropic";
        case SolveMethod::trial_only: return "trial_only";
    }
    return "?";
}

namespace {

struct ActiveSites {
    std::vector<std::uint32_t> index; // active -> original
    std::vector<double> mass;
    std::size_t count() const { return index.size(); }
};

ActiveSites collect_active(const GridDensity& rho) {
    ActiveSites a;
    for (std::size_t i = 0; i < rho.size(); ++i)
        if (rho.mass(i) > 0.0) {
            a.index.push_back(static_cast<std::uint32_t>(i));
            a.mass.push_back(rho.mass(i));
        }
    return a;
}

void check_budget(std::size_t m, int n, double budget, const char* who) {
    double logcount = n * std::log(std::max<std::size_t>(m, 1));
    if (logcount > std::log(budget) + 1e-12)
        throw BudgetError(std::string(who) + ": configuration count M^N exceeds budget");
}

// Multisets of {0..m-1} of size n in lexicographic order.
class OrbitSpace {
public:
    OrbitSpace(std::size_t m, int n) : m_(m), n_(n) {
        std::vector<std::uint32_t> cur(n, 0);
        for (;;) {
            orbits_.insert(orbits_.end(), cur.begin(), cur.end());
            int pos = n - 1;
            while (pos >= 0 && cur[pos] == m - 1) --pos;
            if (pos < 0) break;
            std::uint32_t v = ++cur[pos];
            for (int k = pos + 1; k < n; ++k) cur[k] = v;
        }
    }
    std::size_t count() const { return orbits_.size() / n_; }
    const std::uint32_t* orbit(std::size_t j) const { return orbits_.data() + j * n_; }
    int particles() const { return n_; }

private:
    std::size_t m_;
    int n_;
    std::vector<std::uint32_t> orbits_;
};

double orbit_cost(const std::uint32_t* o, int n, const ActiveSites& act, const KernelMatrix& K) {
    double c = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) c += K(act.index[o[a]], act.index[o[b]]);
    return c;
}

Coupling expand_orbit_coupling(const GridDensity& rho, const ActiveSites& act,
                               const OrbitSpace& orbits,
                               const std::vector<std::pair<std::size_t, double>>& basis) {
    Coupling P;
    P.n_particles = orbits.particles();
    P.sites = std::make_shared<SiteGeometry>(rho.geometry());
    for (const auto& [j, q] : basis) {
        std::vector<std::uint32_t> cfg(orbits.orbit(j), orbits.orbit(j) + orbits.particles());
        for (auto& v : cfg) v = act.index[v];
        std::sort(cfg.begin(), cfg.end());
        std::vector<std::vector<std::uint32_t>> perms;
        do {
            perms.push_back(cfg);
        } while (std::next_permutation(cfg.begin(), cfg.end()));
        for (auto& p : perms) P.support.emplace_back(p, q / perms.size());
    }
    std::sort(P.support.begin(), P.support.end());
    return P;
}

EnergyReport solve_exact(const GridDensity& rho, int N, const KernelMatrix& K,
                         const SolveOptions& opt, double D) {
    ActiveSites act = collect_active(rho);
    check_budget(act.count(), N, opt.budget, "exact_lp");

    EnergyReport rep;
    rep.method = "exact_lp";
    rep.direct = D;

    if (N == 1) {
        // E = -D(rho,rho): the unique coupling is rho itself and C = 0
        Coupling P;
        P.n_particles = 1;
        P.sites = std::make_shared<SiteGeometry>(rho.geometry());
        for (std::size_t a = 0; a < act.count(); ++a)
            P.support.emplace_back(std::vector<std::uint32_t>{act.index[a]}, act.mass[a]);
        rep.primal_upper = -D;
        rep.dual_lower = -D;
        rep.gap = 0.0;
        rep.coupling = std::move(P);
        return rep;
    }

    OrbitSpace orbits(act.count(), N);

    LpProblem lp;
    lp.rows = act.count();
    lp.cols = orbits.count();
    lp.rhs = act.mass;
    lp.cost = [&](std::size_t j) { return orbit_cost(orbits.orbit(j), N, act, K); };
    lp.column = [&](std::size_t j, std::vector<std::pair<std::size_t, double>>& col) {
        const std::uint32_t* o = orbits.orbit(j);
        for (int a = 0; a < N; ++a) {
            bool seen = false;
            for (int b = 0; b < a; ++b)
                if (o[b] == o[a]) { seen = true; break; }
            if (seen) continue;
            double mult = 0.0;
            for (int b = 0; b < N; ++b)
                if (o[b] == o[a]) mult += 1.0;
            col.emplace_back(o[a], mult);
        }
    };

    LpSolution sol = solve_lp(lp);
    if (!sol.feasible) throw std::runtime_error("exact_lp: marginal constraints infeasible");

    // certify the dual: worst violation over all orbit columns
    double min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < orbits.count(); ++j) {
        const std::uint32_t* o = orbits.orbit(j);
        double lhs = 0.0;
        for (int a = 0; a < N; ++a) lhs += sol.dual[o[a]];
        min_slack = std::min(min_slack, lp.cost(j) - lhs);
    }
    double dual_value = 0.0;
    for (std::size_t i = 0; i < act.count(); ++i) dual_value += sol.dual[i] * act.mass[i];
    rep.dual_shift = std::min(min_slack, 0.0);
    dual_value += rep.dual_shift; // shift y -> y + (min_slack/N) 1, sum of masses = N

    rep.primal_upper = sol.value - D;
    rep.dual_lower = dual_value - D;
    rep.gap = rep.primal_upper - rep.dual_lower;
    rep.iterations = sol.iterations;
    rep.coupling = expand_orbit_coupling(rho, act, orbits, sol.basis);
    return rep;
}

// dense configuration enumeration helpers for the entropic path
struct ConfigSpace {
    std::size_t m;
    int n;
    std::size_t count;
    std::vector<double> cost; // per config, indexed by odometer order

    ConfigSpace(const ActiveSites& act, int n_, const KernelMatrix& K) : m(act.count()), n(n_) {
        double c = std::pow(static_cast<double>(m), n);
        count = static_cast<std::size_t>(c + 0.5);
        cost.resize(count);
        std::vector<std::uint32_t> idx(n, 0);
        for (std::size_t pos = 0;; ++pos) {
            double cc = 0.0;
            for (int a = 0; a < n; ++a)
                for (int b = a + 1; b < n; ++b) cc += K(act.index[idx[a]], act.index[idx[b]]);
            cost[pos] = cc;
            int p = n - 1;
            while (p >= 0 && ++idx[p] == m) idx[p--] = 0;
            if (p < 0) break;
        }
    }

    template <typename F>
    void for_each(F&& f) const {
        std::vector<std::uint32_t> idx(n, 0);
        for (std::size_t pos = 0;; ++pos) {
            f(pos, idx);
            int p = n - 1;
            while (p >= 0 && ++idx[p] == m) idx[p--] = 0;
            if (p < 0) break;
        }
    }
};

struct EntropicState {
    std::vector<double> u;   // shared potential, one value per active site
    double epsilon = 0.0;
};

// one marginal sweep; returns total variation against the target a
double entropic_marginals(const ConfigSpace& cs, const std::vector<double>& u, double eps,
                          std::vector<double>& marg) {
    const int n = cs.n;
    // pass 1: max exponent
    double wmax = -std::numeric_limits<double>::infinity();
    cs.for_each([&](std::size_t pos, const std::vector<std::uint32_t>& idx) {
        double e = -cs.cost[pos];
        for (int a = 0; a < n; ++a) e += u[idx[a]];
        e /= eps;
        wmax = std::max(wmax, e);
    });
    // pass 2: accumulate exp(w - wmax) into all slots
    std::fill(marg.begin(), marg.end(), 0.0);
    cs.for_each([&](std::size_t pos, const std::vector<std::uint32_t>& idx) {
        double e = -cs.cost[pos];
        for (int a = 0; a < n; ++a) e += u[idx[a]];
        double g = std::exp(e / eps - wmax);
        for (int a = 0; a < n; ++a) marg[idx[a]] += g;
    });
    // slot marginal = accumulated/n, true scale restored by exp(wmax)
    for (auto& v : marg) v = v / n * std::exp(wmax);
    return wmax; // caller folds the scale if needed
}

EnergyReport solve_entropic(const GridDensity& rho, int N, const KernelMatrix& K,
                            const SolveOptions& opt, double D) {
    ActiveSites act = collect_active(rho);
    check_budget(act.count(), N, std::min(opt.budget, 4e6), "entropic");

    EnergyReport rep;
    rep.method = "entropic";
    rep.direct = D;

    if (N == 1) {
        rep.primal_upper = rep.dual_lower = -D;
        rep.gap = 0.0;
        return rep;
    }

    ConfigSpace cs(act, N, K);
    const std::size_t M = act.count();
    std::vector<double> a(M);
    for (std::size_t i = 0; i < M; ++i) a[i] = act.mass[i] / N;

    double cmin = *std::min_element(cs.cost.begin(), cs.cost.end());
    double cmax = *std::max_element(cs.cost.begin(), cs.cost.end());
    double scale = std::max(cmax - cmin, 1e-6);
    double eps0 = opt.epsilon0 > 0 ? opt.epsilon0 : 0.5 * scale;

    std::vector<double> u(M, 0.0), marg(M);
    long sweeps = 0;
    bool converged = true;

    // primal value after rounding the Gibbs tensor to exact marginals
    auto rounded_primal = [&](double eps) {
        // factors f_i = min(1, a_i / m_i) using the per-slot marginal
        entropic_marginals(cs, u, eps, marg);
        // the Gibbs weights G may carry an arbitrary scale; normalize so that
        // the tensor has total mass 1 before rounding
        double wmax = -std::numeric_limits<double>::infinity();
        cs.for_each([&](std::size_t pos, const std::vector<std::uint32_t>& idx) {
            double e = -cs.cost[pos];
            for (int i = 0; i < N; ++i) e += u[idx[i]];
            wmax = std::max(wmax, e / eps);
        });
        double Z = 0.0;
        cs.for_each([&](std::size_t pos, const std::vector<std::uint32_t>& idx) {
            double e = -cs.cost[pos];
            for (int i = 0; i < N; ++i) e += u[idx[i]];
            Z += std::exp(e / eps - wmax);
        });
        // per-slot marginal of the normalized tensor
        std::vector<double> mn = marg;
        double msum = std::accumulate(mn.begin(), mn.end(), 0.0);
        for (auto& v : mn) v /= msum;
        std::vector<double> f(M);
        for (std::size_t i = 0; i < M; ++i) f[i] = mn[i] > 0 ? std::min(1.0, a[i] / mn[i]) : 1.0;
        // P1 = G/Z * prod_j f(idx_j): cost and per-slot marginal
        double cost1 = 0.0, mass1 = 0.0;
        std::vector<double> m1(M, 0.0);
        cs.for_each([&](std::size_t pos, const std::vector<std::uint32_t>& idx) {
            double e = -cs.cost[pos];
            double fac = 1.0;
            for (int i = 0; i < N; ++i) {
                e += u[idx[i]];
                fac *= f[idx[i]];
            }
            double p = std::exp(e / eps - wmax) / Z * fac;
            cost1 += p * cs.cost[pos];
            mass1 += p;
            for (int i = 0; i < N; ++i) m1[idx[i]] += p / N;
        });
        double delta = 1.0 - mass1;
        if (delta < 1e-15) return cost1;
        std::vector<double> err(M);
        for (std::size_t i = 0; i < M; ++i) err[i] = std::max(a[i] - m1[i], 0.0);
        // product correction (tensor of err/delta, total mass delta):
        // cost = delta * C(N,2) * sum_ij (err_i/delta)(err_j/delta) K_ij
        double quad = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            if (err[i] == 0.0) continue;
            for (std::size_t j = 0; j < M; ++j)
                quad += err[i] * err[j] * K(act.index[i], act.index[j]);
        }
        double pairs = 0.5 * N * (N - 1);
        return cost1 + pairs * quad / delta;
    };

    std::vector<double> primal_trace;
    for (int level = 0; level < opt.epsilon_levels; ++level) {
        double eps = eps0 * std::pow(0.5, level);
        rep.epsilon_schedule.push_back(eps);
        bool level_ok = false;
        for (long it = 0; it < opt.max_sweeps; ++it) {
            ++sweeps;
            entropic_marginals(cs, u, eps, marg);
            double tv = 0.0;
            for (std::size_t i = 0; i < M; ++i) tv += std::abs(marg[i] - a[i]);
            tv *= 0.5;
            if (tv < opt.marginal_tol) {
                level_ok = true;
                break;
            }
            for (std::size_t i = 0; i < M; ++i) {
                double target = std::log(a[i]);
                double cur = std::log(std::max(marg[i], 1e-300));
                u[i] += eps / N * (target - cur);
            }
        }
        if (!level_ok) converged = false;
        primal_trace.push_back(rounded_primal(eps));
        rep.epsilon = eps;
    }

    rep.iterations = sweeps;
    rep.converged = converged;
    rep.primal_upper = primal_trace.back() - D;

    // dual: shift the converged potentials into the feasible region
    double min_slack = std::numeric_limits<double>::infinity();
    cs.for_each([&](std::size_t pos, const std::vector<std::uint32_t>& idx) {
        double lhs = 0.0;
        for (int i = 0; i < N; ++i) lhs += u[idx[i]];
        min_slack = std::min(min_slack, cs.cost[pos] - lhs);
    });
    // shifting u by min_slack/N restores feasibility and changes the dual
    // objective by min_slack * (sum of masses)/N = min_slack for mass N
    rep.dual_shift = std::min(min_slack, 0.0);
    double dual_value = 0.0;
    for (std::size_t i = 0; i < M; ++i) dual_value += u[i] * act.mass[i];
    dual_value += rep.dual_shift * (rho.total_mass() / N);
    rep.dual_lower = dual_value - D;
    rep.gap = rep.primal_upper - rep.dual_lower;

    // three-point Richardson in epsilon (exponents 1 then 2)
    if (primal_trace.size() >= 3) {
        double e1 = primal_trace[primal_trace.size() - 3];
        double e2 = primal_trace[primal_trace.size() - 2];
        double e3 = primal_trace[primal_trace.size() - 1];
        double f1 = 2.0 * e2 - e1;
        double f2 = 2.0 * e3 - e2;
        rep.value_extrapolated = (4.0 * f2 - f1) / 3.0 - D;
    }
    return rep;
}

EnergyReport solve_trial(const GridDensity& rho, int N, const RieszKernel* kernel, double D) {
    EnergyReport rep;
    rep.method = "trial_only";
    rep.direct = D;
    // product coupling energy: C = C(N,2) * 2 D / N^2, E <= C - D = -D/N ... exact identity
    rep.primal_upper = -D / N;
    double lower = -D; // C(P) >= 0 always
    if (kernel && kernel->s == 1.0 && kernel->d == 3) {
        double lo = -1.64 * rho.power_integral(1.0 + kernel->s / kernel->d);
        lower = std::max(lower, lo);
    }
    rep.dual_lower = lower;
    rep.gap = rep.primal_upper - rep.dual_lower;
    return rep;
}

} // namespace

EnergyReport indirect_energy(const GridDensity& rho, int N, const KernelMatrix& K,
                             SolveMethod method, const SolveOptions& opt) {
    if (N < 1) throw std::invalid_argument("indirect_energy: N >= 1 required");
    double mass = rho.total_mass();
    if (std::abs(mass - N) > 1e-6 * std::max(1.0, mass))
        throw std::invalid_argument("indirect_energy: total mass must equal N (canonical problem)");
    double D = direct_term(rho, rho, K);
    switch (method) {
        case SolveMethod::exact_lp: return solve_exact(rho, N, K, opt, D);
        case SolveMethod::entropic: return solve_entropic(rho, N, K, opt, D);
        case SolveMethod::trial_only: return solve_trial(rho, N, nullptr, D);
    }
    throw std::logic_error("indirect_energy: unknown method");
}

EnergyReport indirect_energy(const GridDensity& rho, int N, const RieszKernel& kernel,
                             SolveMethod method, const SolveOptions& opt) {
    KernelMatrix K(kernel, rho.geometry());
    if (method == SolveMethod::trial_only) {
        double D = direct_term(rho, rho, K);
        if (N < 1) throw std::invalid_argument("indirect_energy: N >= 1 required");
        double mass = rho.total_mass();
        if (std::abs(mass - N) > 1e-6 * std::max(1.0, mass))
            throw std::invalid_argument("indirect_energy: total mass must equal N (canonical problem)");
        return solve_trial(rho, N, &kernel, D);
    }
    return indirect_energy(rho, N, K, method, opt);
}

double lo_ratio(const GridDensity& rho, const EnergyReport& report, const RieszKernel& kernel) {
    double denom = rho.power_integral(1.0 + kernel.s / kernel.d);
    if (denom <= 0.0) throw std::invalid_argument("lo_ratio: zero density");
    return -report.primal_upper / denom;
}

} // namespace ueg
