#include <doctest.h>

#include "ueglab/gc.hpp"
#include "ueglab/rng.hpp"

#include <cmath>
#include <map>

using namespace ueg;

namespace {

std::shared_ptr<SiteGeometry> line_geometry(int cells, double length = 1.0) {
    std::vector<double> sites(cells);
    for (int i = 0; i < cells; ++i) sites[i] = (i + 0.5) * length / cells;
    return std::make_shared<SiteGeometry>(1, sites, length / cells);
}

Coupling uniform_one_particle(std::shared_ptr<const SiteGeometry> geom) {
    Coupling c;
    c.n_particles = 1;
    c.sites = geom;
    double w = 1.0 / geom->size();
    for (std::size_t i = 0; i < geom->size(); ++i)
        c.support.push_back({{static_cast<std::uint32_t>(i)}, w});
    return c;
}

GrandCanonicalState half_half(std::shared_ptr<const SiteGeometry> geom, int n_low, int n_high,
                              const Coupling& low, const Coupling& high) {
    GrandCanonicalState st;
    st.sites = geom;
    st.components.push_back({n_low, 0.5, low});
    st.components.push_back({n_high, 0.5, high});
    return st;
}

std::map<std::vector<std::uint32_t>, double> support_map(const Coupling& c) {
    std::map<std::vector<std::uint32_t>, double> m;
    for (const auto& [cfg, w] : c.support) {
        auto key = cfg;
        std::sort(key.begin(), key.end());
        m[key] += w;
    }
    return m;
}

} // namespace

TEST_CASE("gc_tensor convolves number laws and is neutral for the vacuum") {
    auto geom = line_geometry(2);
    Coupling one = uniform_one_particle(geom);
    Coupling empty;
    empty.n_particles = 0;
    empty.sites = geom;
    empty.support.push_back({{}, 1.0});

    GrandCanonicalState A = half_half(geom, 0, 1, empty, one);
    GrandCanonicalState B = half_half(geom, 0, 1, empty, one);
    GrandCanonicalState AB = gc_tensor(A, B);
    auto law = AB.number_law(3);
    CHECK(law[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(law[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(law[2] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(AB.total_weight() == doctest::Approx(1.0).epsilon(1e-14));

    GrandCanonicalState V = gc_vacuum(geom);
    GrandCanonicalState VB = gc_tensor(V, B);
    auto lawB = B.number_law(2), lawVB = VB.number_law(2);
    for (std::size_t n = 0; n < lawB.size(); ++n)
        CHECK(lawVB[n] == doctest::Approx(lawB[n]).epsilon(1e-14));
    GridDensity dB = B.density(), dVB = VB.density();
    for (std::size_t i = 0; i < dB.size(); ++i)
        CHECK(dVB.mass(i) == doctest::Approx(dB.mass(i)).epsilon(1e-14));
}

TEST_CASE("gc_tensor: interaction energy of a product splits as C(A)+C(B)+2D") {
    Rng rng(8);
    auto geom = line_geometry(3);
    RieszKernel kernel(0.5, 1);
    KernelMatrix K(kernel, *geom);
    for (int trial = 0; trial < 5; ++trial) {
        // random two-component states
        auto rand_coupling = [&](int n) {
            Coupling c;
            c.n_particles = n;
            c.sites = geom;
            double left = 1.0;
            for (int k = 0; k < 3; ++k) {
                double w = (k == 2) ? left : left * rng.uniform(0.2, 0.6);
                left -= (k == 2) ? 0.0 : w;
                std::vector<std::uint32_t> cfg(n);
                for (auto& x : cfg) x = static_cast<std::uint32_t>(rng.below(3));
                c.support.push_back({cfg, w});
            }
            return c;
        };
        GrandCanonicalState A = half_half(geom, 1, 2, rand_coupling(1), rand_coupling(2));
        GrandCanonicalState B = half_half(geom, 1, 3, rand_coupling(1), rand_coupling(3));
        GrandCanonicalState AB = gc_tensor(A, B);
        double lhs = gc_interaction_energy(AB, K);
        double rhs = gc_interaction_energy(A, K) + gc_interaction_energy(B, K) +
                     2.0 * direct_term(A.density(), B.density(), K);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        CHECK(AB.mean_particle_number() ==
              doctest::Approx(A.mean_particle_number() + B.mean_particle_number()).epsilon(1e-12));
    }
}

TEST_CASE("gc_tensor is associative up to support merging") {
    auto geom = line_geometry(2);
    Coupling one = uniform_one_particle(geom);
    Coupling empty;
    empty.n_particles = 0;
    empty.sites = geom;
    empty.support.push_back({{}, 1.0});
    GrandCanonicalState A = half_half(geom, 0, 1, empty, one);
    GrandCanonicalState left = gc_tensor(gc_tensor(A, A), A);
    GrandCanonicalState right = gc_tensor(A, gc_tensor(A, A));
    auto lawL = left.number_law(3), lawR = right.number_law(3);
    for (int n = 0; n <= 3; ++n) CHECK(lawL[n] == doctest::Approx(lawR[n]).epsilon(1e-14));
    for (const auto& cl : left.components)
        for (const auto& cr : right.components)
            if (cl.n == cr.n) {
                auto ml = support_map(cl.coupling), mr = support_map(cr.coupling);
                REQUIRE(ml.size() == mr.size());
                for (const auto& [k, v] : ml) CHECK(mr[k] == doctest::Approx(v).epsilon(1e-13));
            }
}

TEST_CASE("localize: full region, empty region, and the product example") {
    auto geom = line_geometry(2);
    // P = mu (x) mu with mu = (delta_A + delta_B)/2
    Coupling P;
    P.n_particles = 2;
    P.sites = geom;
    P.support = {{{0, 0}, 0.25}, {{0, 1}, 0.25}, {{1, 0}, 0.25}, {{1, 1}, 0.25}};

    GrandCanonicalState full = localize(P, {1, 1});
    REQUIRE(full.components.size() == 1);
    CHECK(full.components[0].n == 2);
    CHECK(full.components[0].lambda == doctest::Approx(1.0).epsilon(1e-14));

    GrandCanonicalState vac = localize(P, {0, 0});
    REQUIRE(vac.components.size() == 1);
    CHECK(vac.components[0].n == 0);
    CHECK(vac.components[0].lambda == doctest::Approx(1.0).epsilon(1e-14));

    GrandCanonicalState onA = localize(P, {1, 0});
    auto law = onA.number_law(2);
    CHECK(law[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(law[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(law[2] == doctest::Approx(0.25).epsilon(1e-14));
    // the n=1,2 components live on site A only
    for (const auto& c : onA.components)
        for (const auto& [cfg, w] : c.coupling.support)
            for (auto i : cfg) CHECK(i == 0);
    // density = 1_A rho_P exactly
    GridDensity rho = marginal_of(P);
    GridDensity loc = onA.density();
    CHECK(loc.mass(0) == doctest::Approx(rho.mass(0)).epsilon(1e-14));
    CHECK(loc.mass(1) == 0.0);
}

TEST_CASE("localize conserves probability and reverses the law on the complement") {
    Rng rng(77);
    auto geom = line_geometry(5);
    for (int trial = 0; trial < 10; ++trial) {
        int N = 2 + static_cast<int>(rng.below(2));
        Coupling P;
        P.n_particles = N;
        P.sites = geom;
        double left = 1.0;
        for (int k = 0; k < 6; ++k) {
            double w = (k == 5) ? left : left * rng.uniform(0.1, 0.4);
            left -= (k == 5) ? 0.0 : w;
            std::vector<std::uint32_t> cfg(N);
            for (auto& x : cfg) x = static_cast<std::uint32_t>(rng.below(5));
            P.support.push_back({cfg, w});
        }
        std::vector<char> mask(5, 0);
        for (int i = 0; i < 5; ++i) mask[i] = rng.uniform() < 0.5;
        std::vector<char> co(5);
        for (int i = 0; i < 5; ++i) co[i] = !mask[i];

        GrandCanonicalState inA = localize(P, mask);
        GrandCanonicalState inB = localize(P, co);
        CHECK(inA.total_weight() == doctest::Approx(1.0).epsilon(1e-10));

        // density of the localization = 1_A * rho_P, exactly
        GridDensity rho = marginal_of(P);
        GridDensity da = inA.density();
        for (int i = 0; i < 5; ++i)
            CHECK(da.mass(i) == doctest::Approx(mask[i] ? rho.mass(i) : 0.0).epsilon(1e-14));

        // n particles inside <=> N-n outside
        auto lawA = inA.number_law(N);
        auto lawB = inB.number_law(N);
        for (int n = 0; n <= N; ++n) CHECK(lawA[n] == doctest::Approx(lawB[N - n]).epsilon(1e-12));
    }
}

TEST_CASE("gc_indirect_energy: half mass on one site mixes vacuum and one particle") {
    auto geom = line_geometry(1);
    KernelMatrix K({2.0}, 1); // regularized diagonal value
    GridDensity rho(*geom, {0.5});
    GcSolveResult res = gc_indirect_energy(rho, 0, K);
    double D = direct_term(rho, rho, K); // = 0.5 * 0.25 * 2 = 0.25
    CHECK(res.report.primal_upper == doctest::Approx(-D).epsilon(1e-10));
    auto law = res.state.number_law(4);
    CHECK(law[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(law[1] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("gc_indirect_energy <= canonical energy on integer-mass instances") {
    Rng rng(5150);
    RieszKernel kernel(0.5, 1);
    auto geom = line_geometry(4);
    KernelMatrix K(kernel, *geom);
    for (int trial = 0; trial < 10; ++trial) {
        int N = 1 + static_cast<int>(rng.below(2));
        std::vector<double> m(4);
        double tot = 0.0;
        for (auto& x : m) tot += (x = 0.1 + rng.uniform());
        for (auto& x : m) x *= N / tot;
        GridDensity rho(*geom, m);
        EnergyReport canonical = indirect_energy(rho, N, K, SolveMethod::exact_lp);
        GcSolveResult gc = gc_indirect_energy(rho, 0, K);
        CHECK(gc.report.primal_upper <= canonical.primal_upper + 1e-9);
        CHECK(gc.report.dual_lower <= gc.report.primal_upper + 1e-12);
        // density of the optimal mixture reproduces rho
        GridDensity d = gc.state.density();
        for (int i = 0; i < 4; ++i) CHECK(d.mass(i) == doctest::Approx(m[i]).epsilon(1e-8));
    }
}

TEST_CASE("grand-canonical subadditivity for arbitrary masses on disjoint supports") {
    Rng rng(31337);
    RieszKernel kernel(0.5, 1);
    auto geom = line_geometry(6, 2.0);
    KernelMatrix K(kernel, *geom);
    for (int trial = 0; trial < 8; ++trial) {
        std::vector<double> m1(6, 0.0), m2(6, 0.0);
        for (int i = 0; i < 3; ++i) m1[i] = 0.05 + 0.5 * rng.uniform();
        for (int i = 3; i < 6; ++i) m2[i] = 0.05 + 0.5 * rng.uniform();
        GridDensity r1(*geom, m1), r2(*geom, m2);
        double e1 = gc_indirect_energy(r1, 0, K).report.primal_upper;
        double e2 = gc_indirect_energy(r2, 0, K).report.primal_upper;
        double es = gc_indirect_energy(r1.plus(r2), 0, K).report.primal_upper;
        CHECK(es <= e1 + e2 + 1e-8);
    }
}

TEST_CASE("product trial bound: E_GC <= -D/ceil(mass) and max_n insensitivity") {
    RieszKernel kernel(0.5, 1);
    auto geom = line_geometry(3);
    KernelMatrix K(kernel, *geom);
    for (double mass : {1.0, 1.5, 2.3}) {
        std::vector<double> m{0.5, 0.3, 0.2};
        for (auto& x : m) x *= mass;
        GridDensity rho(*geom, m);
        double D = direct_term(rho, rho, K);
        GcSolveResult res = gc_indirect_energy(rho, 0, K);
        CHECK(res.report.primal_upper <= -D / std::ceil(mass) + 1e-9);

        // the trial state itself achieves the bound
        GrandCanonicalState trial = gc_product_trial(rho);
        GridDensity dt = trial.density();
        for (int i = 0; i < 3; ++i) CHECK(dt.mass(i) == doctest::Approx(m[i]).epsilon(1e-10));
        double e_trial = gc_interaction_energy(trial, K) - D;
        CHECK(e_trial <= -D / std::ceil(mass) + 1e-12);
        CHECK(res.report.primal_upper <= e_trial + 1e-9);

        // truncation sensitivity: max_n + 2 changes nothing measurable
        int default_n = static_cast<int>(std::ceil(mass)) + 3;
        GcSolveResult wider = gc_indirect_energy(rho, default_n + 2, K);
        CHECK(std::abs(wider.report.primal_upper - res.report.primal_upper) < 1e-6);
    }
}

TEST_CASE("rationalize_weights finds small denominators") {
    auto [p, q] = rationalize_weights({0.5, 0.0, 0.5});
    CHECK(q == 2);
    CHECK(p[0] == 1);
    CHECK(p[2] == 1);
    auto [p2, q2] = rationalize_weights({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    CHECK(q2 == 3);
    CHECK_THROWS(rationalize_weights({0.123456789, 0.876543211}, 7));
}

TEST_CASE("replicate_to_canonical: degenerate q=1 and the single-site example") {
    auto geom = line_geometry(1);
    auto big2 = line_geometry(2);
    Coupling one;
    one.n_particles = 1;
    one.sites = geom;
    one.support = {{{0}, 1.0}};
    Coupling empty;
    empty.n_particles = 0;
    empty.sites = geom;
    empty.support = {{{}, 1.0}};

    // q = 1: the single component placed in the single copy
    GrandCanonicalState pure = gc_from_coupling(one);
    Coupling q1 = replicate_to_canonical(pure, 1, {{0}}, geom);
    REQUIRE(q1.support.size() == 1);
    CHECK(q1.support[0].second == doctest::Approx(1.0).epsilon(1e-14));

    // (lambda_0, lambda_1) = (1/2, 1/2), q = 2: symmetrized one particle in
    // one of two sites
    GrandCanonicalState half = half_half(geom, 0, 1, empty, one);
    Coupling Q = replicate_to_canonical(half, 2, {{0}, {1}}, big2);
    CHECK(Q.n_particles == 1);
    auto m = support_map(Q);
    REQUIRE(m.size() == 2);
    CHECK(m[{0}] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(m[{1}] == doctest::Approx(0.5).epsilon(1e-14));

    // restriction of Q to each copy reproduces the original state
    GrandCanonicalState back = localize(Q, {1, 0});
    auto law = back.number_law(1);
    CHECK(law[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(law[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("replication lemma inequality on small discrete instances") {
    // rho_P = 1_C on a two-site cell; states with weights p_n/q and mean 2
    RieszKernel kernel(0.5, 1);
    for (long q : {2L, 3L}) {
        auto cell = line_geometry(2); // sites 0.25, 0.75; unit masses = "1_C"
        // big geometry: q adjacent translated copies
        std::vector<double> big_sites;
        std::vector<std::vector<std::uint32_t>> copy_map(q);
        for (long c = 0; c < q; ++c)
            for (int i = 0; i < 2; ++i) {
                copy_map[c].push_back(static_cast<std::uint32_t>(big_sites.size()));
                big_sites.push_back(0.25 + 0.5 * i + static_cast<double>(c));
            }
        auto big = std::make_shared<SiteGeometry>(1, big_sites, 0.5);
        KernelMatrix Kc(kernel, *cell);
        KernelMatrix Kb(kernel, *big);

        // components: q=2 -> (1/2,1/2) on n={1,3}; q=3 -> thirds on n={1,2,3}
        auto product_n = [&](int n, double site_w0) {
            Coupling c;
            c.n_particles = n;
            c.sites = cell;
            std::vector<std::uint32_t> idx(n, 0);
            for (;;) {
                double w = 1.0;
                for (auto v : idx) w *= v == 0 ? site_w0 : 1.0 - site_w0;
                c.support.push_back({idx, w});
                int pos = n - 1;
                while (pos >= 0 && idx[pos] == 1) idx[pos--] = 0;
                if (pos < 0) break;
                ++idx[pos];
            }
            return c;
        };
        GrandCanonicalState P;
        P.sites = cell;
        if (q == 2) {
            P.components.push_back({1, 0.5, product_n(1, 0.5)});
            P.components.push_back({3, 0.5, product_n(3, 0.5)});
        } else {
            P.components.push_back({1, 1.0 / 3.0, product_n(1, 0.5)});
            P.components.push_back({2, 1.0 / 3.0, product_n(2, 0.5)});
            P.components.push_back({3, 1.0 / 3.0, product_n(3, 0.5)});
        }
        GridDensity rho_cell = P.density();
        for (int i = 0; i < 2; ++i) CHECK(rho_cell.mass(i) == doctest::Approx(1.0).epsilon(1e-12));

        Coupling Q = replicate_to_canonical(P, q, copy_map, big);
        CHECK(Q.n_particles == 2 * q);
        GridDensity rho_big = marginal_of(Q);
        for (std::size_t i = 0; i < rho_big.size(); ++i)
            CHECK(rho_big.mass(i) == doctest::Approx(1.0).epsilon(1e-12));

        // restriction of Q to the first copy equals P
        std::vector<char> mask(big_sites.size(), 0);
        mask[copy_map[0][0]] = mask[copy_map[0][1]] = 1;
        GrandCanonicalState back = localize(Q, mask);
        auto lawP = P.number_law(3), lawQ = back.number_law(3);
        for (int n = 0; n <= 3; ++n) CHECK(lawQ[n] == doctest::Approx(lawP[n]).epsilon(1e-12));

        // the inequality, both sides via exact LP machinery
        double lhs = (gc_interaction_energy(P, Kc) - direct_term(rho_cell, rho_cell, Kc)) / 2.0;
        GridDensity ones(*big, std::vector<double>(big_sites.size(), 1.0));
        EnergyReport Ebig = indirect_energy(ones, static_cast<int>(2 * q), Kb,
                                            SolveMethod::exact_lp);
        double Dbig = direct_term(ones, ones, Kb);
        double rhs = Ebig.primal_upper / (2.0 * q) - Dbig / ((q - 1.0) * 2.0 * q);
        CHECK(lhs >= rhs - 1e-8);
    }
}
