#include "ueglab/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ueg {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string density_csv(const GridDensity& rho) {
    const auto& g = rho.geometry();
    std::string out;
    out += g.dim() == 1 ? "x,mass\n" : (g.dim() == 2 ? "x,y,mass\n" : "x,y,z,mass\n");
    for (std::size_t i = 0; i < rho.size(); ++i) {
        for (int a = 0; a < g.dim(); ++a) {
            out += format_double(g.site(i)[a]);
            out += ',';
        }
        out += format_double(rho.mass(i));
        out += '\n';
    }
    return out;
}

Json density_descriptor(const GridDensity& rho, double s, int d) {
    Json j;
    j["s"] = s;
    j["d"] = d;
    j["cell_volume"] = rho.geometry().cell_volume();
    j["total_mass"] = rho.total_mass();
    j["sites"] = rho.size();
    return j;
}

Json report_json(const EnergyReport& rep, double s, int d, int N, std::size_t sites) {
    Json j;
    j["s"] = s;
    j["d"] = d;
    j["N"] = N;
    j["M"] = sites;
    j["method"] = rep.method;
    j["primal_upper"] = rep.primal_upper;
    j["dual_lower"] = rep.dual_lower;
    j["gap"] = rep.gap;
    j["iterations"] = rep.iterations;
    j["epsilon_schedule"] = rep.epsilon_schedule;
    j["epsilon"] = rep.epsilon;
    j["dual_shift"] = rep.dual_shift;
    j["direct_term"] = rep.direct;
    j["converged"] = rep.converged;
    if (rep.value_extrapolated) j["value_extrapolated"] = *rep.value_extrapolated;
    return j;
}

std::string coupling_csv(const Coupling& P) {
    std::string out = "probability";
    for (int a = 0; a < P.n_particles; ++a) out += ",site" + std::to_string(a + 1);
    out += '\n';
    for (const auto& [cfg, w] : P.support) {
        out += format_double(w);
        for (auto i : cfg) out += ',' + std::to_string(i);
        out += '\n';
    }
    return out;
}

Json monge_json(const Monge1DSolution& sol) {
    Json j;
    j["s"] = sol.s;
    j["N"] = sol.N;
    j["breakpoints"] = sol.breakpoints;
    j["interaction"] = sol.interaction;
    j["direct_term"] = sol.direct;
    j["energy"] = sol.energy;
    j["quadrature_error_estimate"] = sol.quadrature_error_estimate;
    return j;
}

Json gc_state_json(const GrandCanonicalState& st) {
    Json comps = Json::array();
    double checksum = 0.0;
    GridDensity rho = st.density();
    for (std::size_t i = 0; i < rho.size(); ++i) checksum += (i + 1) * rho.mass(i);
    for (const auto& c : st.components) {
        Json jc;
        jc["n"] = c.n;
        jc["lambda"] = c.lambda;
        jc["support_size"] = c.coupling.support.size();
        comps.push_back(jc);
    }
    Json j;
    j["components"] = comps;
    j["mean_particle_number"] = st.mean_particle_number();
    j["density_checksum"] = checksum;
    return j;
}

std::string thermo_csv(const ThermoSeries& series) {
    std::string out = "volume,N,value,bound_kind,error_estimate\n";
    for (const auto& r : series.records) {
        out += format_double(r.volume);
        out += ',' + format_double(r.n_particles);
        out += ',' + format_double(r.per_volume_energy);
        out += ',' + bound_kind_name(r.kind);
        out += ',' + format_double(r.error_estimate);
        out += '\n';
    }
    return out;
}

Json thermo_summary_json(const ThermoSeries& series) {
    Json j;
    j["records"] = series.records.size();
    j["extrapolated_value"] = series.extrapolated_value;
    j["extrapolation_error_estimate"] = series.extrapolation_error_estimate;
    j["extrapolated_geometric"] = series.extrapolated_geometric;
    if (series.refined_available) j["extrapolated_refined"] = series.extrapolated_refined;
    j["truncated_by_budget"] = series.truncated_by_budget;
    if (!series.note.empty()) j["note"] = series.note;
    return j;
}

Json gs_kernel_json(const GSKernel& kernel, const GSDiagnostics& diag) {
    Json j;
    j["ell"] = kernel.ell;
    j["seed"] = kernel.seed;
    j["mc_samples"] = kernel.mc_samples;
    j["support_radius"] = kernel.support_radius;
    j["h0"] = diag.h0;
    j["min_transform"] = diag.min_transform;
    j["min_transform_k"] = diag.min_transform_k;
    j["sigma_at_min"] = diag.sigma_at_min;
    j["within_three_sigma"] = diag.within_three_sigma;
    return j;
}

std::string gs_kernel_csv(const GSKernel& kernel) {
    std::string out = "r,h,sigma\n";
    for (std::size_t i = 0; i < kernel.r_grid.size(); ++i) {
        out += format_double(kernel.r_grid[i]);
        out += ',' + format_double(kernel.h[i]);
        out += ',' + format_double(kernel.sigma[i]);
        out += '\n';
    }
    return out;
}

Json quantum_json(const QuantumBoundReport& rep) {
    Json j;
    j["hbar2"] = rep.hbar2;
    j["q"] = rep.q;
    j["kinetic"] = rep.kinetic;
    j["exchange"] = rep.exchange;
    j["upper"] = rep.upper;
    j["refined_upper"] = rep.refined_upper;
    j["lower"] = rep.lower;
    return j;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
}

} // namespace ueg
