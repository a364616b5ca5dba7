#pragma once

#include "ueglab/riesz.hpp"

#include <memory>
#include <vector>

namespace ueg {

// One-dimensional densities with CDF machinery. inverse_cdf falls back to
// monotone bisection (1e-12); subclasses with closed-form CDFs override it.
class Density1D {
public:
    virtual ~Density1D() = default;
    virtual double mass() const = 0;
    virtual double lo() const = 0;
    virtual double hi() const = 0;
    virtual double value(double x) const = 0;
    virtual double cdf(double x) const = 0;
    virtual double inverse_cdf(double m) const;
    // points where the density (hence the transport map) has kinks
    virtual std::vector<double> kinks() const { return {lo(), hi()}; }
};

// Piecewise-constant density: sorted disjoint pieces [a,b) with height h.
class StepDensity1D final : public Density1D {
public:
    struct Piece {
        double a, b, h;
    };

    explicit StepDensity1D(std::vector<Piece> pieces);
    static StepDensity1D uniform(double a, double b, double height = 1.0);

    double mass() const override { return mass_; }
    double lo() const override { return pieces_.front().a; }
    double hi() const override { return pieces_.back().b; }
    double value(double x) const override;
    double cdf(double x) const override;
    double inverse_cdf(double m) const override; // exact piecewise-linear inversion
    std::vector<double> kinks() const override;

    // rho(x / lambda): support dilated, mass multiplied by lambda
    StepDensity1D dilated(double lambda) const;

    const std::vector<Piece>& pieces() const { return pieces_; }

    // 1/2 int int rho(x) rho(y) |x-y|^p dx dy in closed form, p > -1, p != 0
    double pair_energy(double p) const;

    // int rho^p
    double power_integral(double p) const;

    // int |x-y|^p rho(y) dy
    double potential(double x, double p) const;

private:
    std::vector<Piece> pieces_;
    std::vector<double> cum_;
    double mass_;
};

// Linear-ramp density rho(x) = slope * x on [0, L] (test oracle for CDF
// inversion; the closed-form CDF is quadratic).
class RampDensity1D final : public Density1D {
public:
    RampDensity1D(double slope, double length) : c_(slope), L_(length) {}
    double mass() const override { return 0.5 * c_ * L_ * L_; }
    double lo() const override { return 0.0; }
    double hi() const override { return L_; }
    double value(double x) const override { return (x >= 0.0 && x <= L_) ? c_ * x : 0.0; }
    double cdf(double x) const override {
        if (x <= 0.0) return 0.0;
        if (x >= L_) return mass();
        return 0.5 * c_ * x * x;
    }

private:
    double c_, L_;
};

// a_1..a_{N-1} with unit mass per cell
std::vector<double> breakpoints(const Density1D& rho, int N);

struct Monge1DSolution {
    double s = 0.0;
    int N = 0;
    std::vector<double> breakpoints; // interior a_1..a_{N-1}
    double interaction = 0.0;        // C(P) of the Monge coupling
    double direct = 0.0;             // D(rho,rho)
    double energy = 0.0;             // C - D
    double quadrature_error_estimate = 0.0;
    double min_gap = 0.0;            // smallest particle gap seen (must stay > 0)
};

// Transport map of the increasing-map coupling: T^j y = F^{-1}(F(y) + j),
// with a cyclic wrap back to the first cell when F(y) + j exceeds the mass.
double monge_transport(const Density1D& rho, double y, int steps);

// Exact 1D indirect energy for 0 < s < 1 via the increasing-map coupling.
// The displayed measure is normalized by restricting y to the first cell
// (equivalently dividing the full-line display by N), which is the unique
// normalization making the marginal equal to rho.
Monge1DSolution indirect_energy_1d(const Density1D& rho, int N, double s);

// LHS of the d=1, -1 <= s < 0 pointwise bound applied to one configuration:
//   -sum_{j<k}|x_j-x_k|^{|s|} + sum_j int |x_j-y|^{|s|} rho(y) dy
//   - 1/2 int int rho rho |x-y|^{|s|},
// nonnegative whenever the configuration size equals the mass of rho.
double lo_defect_1d(const std::vector<double>& config, const StepDensity1D& rho, double s_negative);

// coupling version: the defect integrated against (config, probability) pairs
double lo_defect_1d(const std::vector<std::pair<std::vector<double>, double>>& coupling,
                    const StepDensity1D& rho, double s_negative);

// exact mid-cell discretization: cell masses are CDF differences
GridDensity discretize_1d(const Density1D& rho, int cells);

} // namespace ueg
