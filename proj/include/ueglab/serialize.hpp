#pragma once

#include "ueglab/gc.hpp"
#include "ueglab/gskernel.hpp"
#include "ueglab/mmot.hpp"
#include "ueglab/monge1d.hpp"
#include "ueglab/quantum.hpp"
#include "ueglab/thermo.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace ueg {

using Json = nlohmann::ordered_json;

// fixed %.12g formatting so that artifacts are byte-stable
std::string format_double(double v);

std::string density_csv(const GridDensity& rho);
Json density_descriptor(const GridDensity& rho, double s, int d);

Json report_json(const EnergyReport& rep, double s, int d, int N, std::size_t sites);
std::string coupling_csv(const Coupling& P);

Json monge_json(const Monge1DSolution& sol);
Json gc_state_json(const GrandCanonicalState& st);

std::string thermo_csv(const ThermoSeries& series);
Json thermo_summary_json(const ThermoSeries& series);

Json gs_kernel_json(const GSKernel& kernel, const GSDiagnostics& diag);
std::string gs_kernel_csv(const GSKernel& kernel);

Json quantum_json(const QuantumBoundReport& rep);

void write_file(const std::string& path, const std::string& content);

} // namespace ueg
