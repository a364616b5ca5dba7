#include <doctest.h>

#include "oracles.hpp"
#include "ueglab/mmot.hpp"
#include "ueglab/monge1d.hpp"
#include "ueglab/rng.hpp"

#include <cmath>

using namespace ueg;

TEST_CASE("breakpoints: uniform intervals split evenly") {
    StepDensity1D u2 = StepDensity1D::uniform(0.0, 2.0);
    auto b2 = breakpoints(u2, 2);
    REQUIRE(b2.size() == 1);
    CHECK(b2[0] == doctest::Approx(1.0).epsilon(1e-12));

    StepDensity1D u3 = StepDensity1D::uniform(0.0, 3.0);
    auto b3 = breakpoints(u3, 3);
    REQUIRE(b3.size() == 2);
    CHECK(b3[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b3[1] == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS(breakpoints(u2, 3), std::invalid_argument);
}

TEST_CASE("breakpoints of the triangular density sit at the mass median") {
    // rho(x) = 4x on [0,1], mass 2; CDF(x) = 2x^2, so a_1 = 1/sqrt(2)
    RampDensity1D ramp(4.0, 1.0);
    auto b = breakpoints(ramp, 2);
    REQUIRE(b.size() == 1);
    CHECK(b[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
    // cross-check against the bisection-on-CDF oracle
    double by_bisect = oracle::bisect_inverse([&](double x) { return ramp.cdf(x); }, 1.0, 0.0, 1.0);
    CHECK(b[0] == doctest::Approx(by_bisect).epsilon(1e-9));
}

TEST_CASE("1D Monge energies: hand values for uniform densities") {
    Monge1DSolution s2 = indirect_energy_1d(StepDensity1D::uniform(0.0, 2.0), 2, 0.5);
    CHECK(s2.interaction == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(s2.energy == doctest::Approx(-2.77124).epsilon(1e-5));
    CHECK(s2.quadrature_error_estimate < 1e-10);

    Monge1DSolution s3 = indirect_energy_1d(StepDensity1D::uniform(0.0, 3.0), 3, 0.5);
    CHECK(s3.interaction == doctest::Approx(2.70711).epsilon(1e-5));
    CHECK(s3.energy == doctest::Approx(-4.22109).epsilon(1e-5));

    Monge1DSolution s1 = indirect_energy_1d(StepDensity1D::uniform(0.0, 1.0), 1, 0.5);
    CHECK(s1.energy == doctest::Approx(-s1.direct).epsilon(1e-12));
}

TEST_CASE("monge transport pushes cell k onto cell k+1 and wraps cyclically") {
    StepDensity1D rho({{0.0, 0.5, 1.2}, {0.5, 1.5, 0.4}});
    StepDensity1D scaled = rho.dilated(2.0); // mass 2
    double a1 = breakpoints(scaled, 2)[0];
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        double y = scaled.inverse_cdf(rng.uniform()); // first cell
        double ty = monge_transport(scaled, y, 1);
        CHECK(scaled.cdf(ty) == doctest::Approx(scaled.cdf(y) + 1.0).epsilon(1e-9));
        CHECK(ty >= a1 - 1e-9);
        // wrap: one more step returns to the first cell
        double tty = monge_transport(scaled, y, 2);
        CHECK(scaled.cdf(tty) == doctest::Approx(scaled.cdf(y)).epsilon(1e-9));
    }
}

TEST_CASE("Monge value is certified by LP refinements from both sides (O(h))") {
    const double s = 0.5;
    StepDensity1D rho = StepDensity1D::uniform(0.0, 2.0);
    Monge1DSolution monge = indirect_energy_1d(rho, 2, s);
    RieszKernel kernel(s, 1);
    double prev_err = 1e300;
    for (int cells : {15, 30, 60}) {
        GridDensity grid = discretize_1d(rho, cells);
        EnergyReport rep = indirect_energy(grid, 2, kernel, SolveMethod::exact_lp);
        double err = std::abs(rep.primal_upper - monge.energy);
        CHECK(err < prev_err);
        CHECK(err < 4.0 / cells); // O(h) envelope
        prev_err = err;
    }
    CHECK(prev_err < 0.05);
}

TEST_CASE("two-plateau Monge energy agrees with discretized exact LP") {
    const double s = 0.5;
    StepDensity1D base({{0.0, 0.5, 1.2}, {0.5, 1.5, 0.4}});
    StepDensity1D rho = base.dilated(2.0);
    Monge1DSolution monge = indirect_energy_1d(rho, 2, s);
    GridDensity grid = discretize_1d(rho, 60);
    RieszKernel kernel(s, 1);
    EnergyReport rep = indirect_energy(grid, 2, kernel, SolveMethod::exact_lp);
    CHECK(rep.primal_upper == doctest::Approx(monge.energy).epsilon(0.03));
}

TEST_CASE("lo_defect_1d is nonnegative: hand configurations") {
    // symmetric points at +/-1 with a matching mass-2 density
    StepDensity1D rho = StepDensity1D::uniform(-2.0, 2.0, 0.5);
    double defect = lo_defect_1d(std::vector<double>{-1.0, 1.0}, rho, -0.5);
    CHECK(defect >= -1e-8);

    // concentrated density, configuration at its barycenter pattern
    StepDensity1D tight = StepDensity1D::uniform(-0.05, 0.05, 10.0);
    double d2 = lo_defect_1d(std::vector<double>{0.0}, tight, -0.5);
    CHECK(d2 >= -1e-8);

    CHECK_THROWS_AS(lo_defect_1d(std::vector<double>{0.0}, rho, -0.5), std::invalid_argument);
    CHECK_THROWS_AS(lo_defect_1d(std::vector<double>{-1.0, 1.0}, rho, 0.5), std::domain_error);
}

TEST_CASE("lo_defect_1d randomized property: 50 configurations and densities") {
    Rng rng(314);
    for (int trial = 0; trial < 50; ++trial) {
        int N = 1 + static_cast<int>(rng.below(4));
        double sneg = -1.0 + 0.99 * rng.uniform(); // [-1, -0.01)
        double a = rng.uniform(-2.0, 0.0), b = a + 0.5 + 2.0 * rng.uniform();
        double h = N / (b - a);
        std::vector<StepDensity1D::Piece> pieces{{a, 0.5 * (a + b), 0.6 * h},
                                                 {0.5 * (a + b), b, 1.4 * h}};
        StepDensity1D rho(pieces);
        // rescale to exact mass N
        double scale = N / rho.mass();
        for (auto& p : pieces) p.h *= scale;
        StepDensity1D rho2(pieces);
        std::vector<double> cfg(N);
        for (auto& x : cfg) x = rng.uniform(a - 1.0, b + 1.0);
        CHECK(lo_defect_1d(cfg, rho2, sneg) >= -1e-8);
    }
}

TEST_CASE("lo_defect_1d coupling version integrates the pointwise defect") {
    StepDensity1D rho = StepDensity1D::uniform(-1.0, 1.0);
    std::vector<std::pair<std::vector<double>, double>> coupling{
        {{-0.5, 0.5}, 0.5}, {{-0.9, 0.2}, 0.5}};
    double v = lo_defect_1d(coupling, rho, -1.0);
    double manual = 0.5 * lo_defect_1d(std::vector<double>{-0.5, 0.5}, rho, -1.0) +
                    0.5 * lo_defect_1d(std::vector<double>{-0.9, 0.2}, rho, -1.0);
    CHECK(v == doctest::Approx(manual).epsilon(1e-14));
    CHECK(v >= -1e-8);
}
