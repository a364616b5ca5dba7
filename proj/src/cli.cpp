#include "ueglab/cli.hpp"

#include "ueglab/domain.hpp"
#include "ueglab/errors.hpp"
#include "ueglab/gc.hpp"
#include "ueglab/gskernel.hpp"
#include "ueglab/lattice.hpp"
#include "ueglab/mmot.hpp"
#include "ueglab/monge1d.hpp"
#include "ueglab/quantum.hpp"
#include "ueglab/serialize.hpp"
#include "ueglab/thermo.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <memory>
#include <sstream>

namespace ueg {

namespace {

struct CommonOpts {
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    double budget = 1e7;
    int threads = 1;
    bool plot_data = false;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--out", c.out_dir, "output directory for artifacts");
    cmd->add_option("--seed", c.seed, "seed; fully determines all stochastic outputs");
    cmd->add_option("--budget", c.budget, "configuration-space budget (see also UEGLAB_BUDGET)");
    cmd->add_option("--threads", c.threads,
                    "cap on worker parallelism; results never depend on it");
    cmd->add_flag("--plot-data", c.plot_data, "also emit plain x,y columns for plotting");
    cmd->set_config("--config", "", "flat key=value config file; command-line flags override it");
}

Json common_json(const CommonOpts& c) {
    Json j;
    j["out"] = c.out_dir;
    j["seed"] = c.seed;
    j["budget"] = c.budget;
    j["threads"] = c.threads;
    j["plot_data"] = c.plot_data;
    return j;
}

void finish_artifact(Json& j, const Json& config) {
    j["config"] = config;
    j["version"] = kVersion;
}

// density specs: uniform:a,b | step:a,b,h[;a,b,h...] (d=1), cube:side |
// ball:radius (d=3)
std::vector<double> split_numbers(const std::string& text, char sep) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, sep))
        if (!tok.empty()) out.push_back(std::stod(tok));
    return out;
}

StepDensity1D parse_density_1d(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("density spec must look like kind:params");
    std::string kind = spec.substr(0, colon);
    std::string params = spec.substr(colon + 1);
    if (kind == "uniform") {
        auto v = split_numbers(params, ',');
        if (v.size() == 2) return StepDensity1D::uniform(v[0], v[1], 1.0);
        if (v.size() == 3) return StepDensity1D::uniform(v[0], v[1], v[2]);
        throw std::invalid_argument("uniform:a,b[,height]");
    }
    if (kind == "step") {
        std::vector<StepDensity1D::Piece> pieces;
        std::stringstream ss(params);
        std::string piece;
        while (std::getline(ss, piece, ';')) {
            auto v = split_numbers(piece, ',');
            if (v.size() != 3) throw std::invalid_argument("step:a,b,h;a,b,h...");
            pieces.push_back({v[0], v[1], v[2]});
        }
        return StepDensity1D(pieces);
    }
    throw std::invalid_argument("unknown 1d density kind: " + kind);
}

GridDensity parse_density_grid(const std::string& spec, int d, int grid) {
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("density spec must look like kind:params");
    std::string kind = spec.substr(0, colon);
    auto v = split_numbers(spec.substr(colon + 1), ',');
    if (d == 1) return discretize_1d(parse_density_1d(spec), grid);
    if (kind == "cube" && v.size() >= 1) return discretize(*make_cube(d, v[0]), grid, v.size() > 1 ? v[1] : 1.0);
    if (kind == "ball" && v.size() >= 1) return discretize(*make_ball(d, v[0]), grid, v.size() > 1 ? v[1] : 1.0);
    throw std::invalid_argument("unknown density kind for d=" + std::to_string(d) + ": " + kind);
}

SolveMethod parse_method(const std::string& m) {
    if (m == "exact_lp") return SolveMethod::exact_lp;
    if (m == "entropic") return SolveMethod::entropic;
    if (m == "trial_only" || m == "trial") return SolveMethod::trial_only;
    throw std::invalid_argument("unknown method: " + m);
}

std::string path_join(const std::string& dir, const std::string& name) {
    if (dir.empty() || dir == ".") return name;
    return dir + "/" + name;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"indirect Coulomb/Riesz energies of fixed densities via multi-marginal "
                 "optimal transport, with uniform-electron-gas estimates"};
    app.require_subcommand(1);

    // defaults; UEGLAB_BUDGET overrides the built-in default, flags override both
    double env_budget = 1e7;
    if (const char* e = std::getenv("UEGLAB_BUDGET")) env_budget = std::atof(e);

    // ---- indirect-energy / lo-ratio (shared options) ----
    struct EnergyOpts {
        CommonOpts common;
        double s = 1.0;
        int d = 3;
        std::string density = "cube:1";
        int N = 1;
        int grid = 16;
        std::string method = "exact_lp";
    };
    auto energy_opts = std::make_shared<EnergyOpts>();
    auto add_energy_opts = [&](CLI::App* cmd) {
        cmd->add_option("--s", energy_opts->s, "interaction exponent, 0 < s < d");
        cmd->add_option("--d", energy_opts->d, "spatial dimension (1 or 3)");
        cmd->add_option("--density", energy_opts->density,
                        "uniform:a,b | step:a,b,h;... (d=1), cube:side | ball:r (d=3)");
        cmd->add_option("--N", energy_opts->N, "particle number (= total mass)");
        cmd->add_option("--grid", energy_opts->grid, "cells (d=1) or cells per axis (d=3)");
        cmd->add_option("--method", energy_opts->method, "exact_lp | entropic | trial_only");
        add_common(cmd, energy_opts->common);
    };
    CLI::App* c_energy = app.add_subcommand("indirect-energy", "indirect energy of a density");
    add_energy_opts(c_energy);
    CLI::App* c_ratio = app.add_subcommand("lo-ratio", "Lieb-Oxford ratio of a solved instance");
    add_energy_opts(c_ratio);

    // ---- monge1d ----
    struct MongeOpts {
        CommonOpts common;
        double s = 0.5;
        int N = 2;
        std::string density = "uniform:0,2";
    } monge_opts;
    CLI::App* c_monge = app.add_subcommand("monge1d", "exact 1D solve via the increasing map");
    c_monge->add_option("--s", monge_opts.s, "exponent, 0 < s < 1");
    c_monge->add_option("--N", monge_opts.N, "particle number");
    c_monge->add_option("--density", monge_opts.density, "uniform:a,b | step:a,b,h;...");
    add_common(c_monge, monge_opts.common);

    // ---- gc-energy ----
    struct GcOpts {
        CommonOpts common;
        double s = 0.5;
        int d = 1;
        std::string density = "uniform:0,1,0.5";
        int grid = 4;
        int max_n = 0;
    } gc_opts;
    CLI::App* c_gc = app.add_subcommand("gc-energy", "grand-canonical indirect energy "
                                                     "(non-integer mass allowed)");
    c_gc->add_option("--s", gc_opts.s, "exponent");
    c_gc->add_option("--d", gc_opts.d, "dimension");
    c_gc->add_option("--density", gc_opts.density, "density spec; mass may be fractional");
    c_gc->add_option("--grid", gc_opts.grid, "cells");
    c_gc->add_option("--max-n", gc_opts.max_n, "component cutoff; 0 = ceil(mass)+3");
    add_common(c_gc, gc_opts.common);

    // ---- thermo-cubes ----
    struct ThermoOpts {
        CommonOpts common;
        double s = 0.5;
        int d = 1;
        int levels = 4;
        int grid = 3;
    } thermo_opts;
    CLI::App* c_thermo = app.add_subcommand("thermo-cubes", "doubling-sequence thermodynamic limit");
    c_thermo->add_option("--s", thermo_opts.s, "exponent (d=1 path)");
    c_thermo->add_option("--d", thermo_opts.d, "dimension (1 exact, 3 trial/dual)");
    c_thermo->add_option("--levels", thermo_opts.levels, "number of doublings");
    c_thermo->add_option("--grid", thermo_opts.grid, "cells per axis for d=3 exact records");
    add_common(c_thermo, thermo_opts.common);

    // ---- lda-limit ----
    struct LdaOpts {
        CommonOpts common;
        double s = 0.5;
        int d = 1;
        std::string n_list = "8,16,32,64";
        std::string density = "step:0,0.5,1.2;0.5,1.5,0.4";
        int levels = 4;
    } lda_opts;
    CLI::App* c_lda = app.add_subcommand("lda-limit", "scaled-density limit experiment");
    c_lda->add_option("--s", lda_opts.s, "exponent (d=1)");
    c_lda->add_option("--d", lda_opts.d, "1: exact Monge; 3: crystal-trial upper bounds");
    c_lda->add_option("--N-list", lda_opts.n_list, "comma-separated scale indices");
    c_lda->add_option("--density", lda_opts.density, "base density of mass 1 (d=1)");
    c_lda->add_option("--levels", lda_opts.levels, "doublings for the reference series (d=1)");
    add_common(c_lda, lda_opts.common);

    // ---- floating-crystal ----
    struct CrystalOpts {
        CommonOpts common;
        int cutoff = 8;
        double tail_target = 1e300;
    } crystal_opts;
    CLI::App* c_crystal = app.add_subcommand("floating-crystal",
                                             "smeared-lattice upper bound for e_UEG");
    c_crystal->add_option("--cutoff", crystal_opts.cutoff, "lattice cutoff R");
    c_crystal->add_option("--tail-target", crystal_opts.tail_target,
                          "fail if the fitted tail bound exceeds this");
    add_common(c_crystal, crystal_opts.common);

    // ---- gs-kernel ----
    struct GsOpts {
        CommonOpts common;
        double ell = 1.0;
        std::size_t samples = 100000;
        std::size_t radial = 61;
    } gs_opts;
    CLI::App* c_gs = app.add_subcommand("gs-kernel", "tetrahedron kernel and its transform");
    c_gs->add_option("--ell", gs_opts.ell, "tetrahedron scale");
    c_gs->add_option("--samples", gs_opts.samples, "MC samples per radial node (>= 1e4)");
    c_gs->add_option("--radial", gs_opts.radial, "radial nodes (odd)");
    add_common(c_gs, gs_opts.common);

    // ---- quantum-bounds ----
    struct QuantumOpts {
        CommonOpts common;
        int q = 2;
        double hbar2 = 1.0;
        double box = 8.0;
        int grid = 8;
    } quantum_opts;
    CLI::App* c_quantum = app.add_subcommand("quantum-bounds",
                                             "TF/Dirac constants and quasi-free bounds");
    c_quantum->add_option("--q", quantum_opts.q, "spin states");
    c_quantum->add_option("--hbar2", quantum_opts.hbar2, "hbar^2 scale");
    c_quantum->add_option("--box-side", quantum_opts.box, "box side for the exchange check");
    c_quantum->add_option("--grid", quantum_opts.grid, "cells per axis for the grid bound");
    add_common(c_quantum, quantum_opts.common);

    std::vector<const char*> argv;
    argv.push_back("ueglab");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::endl;
        return 64;
    }

    auto apply_env_budget = [&](CommonOpts& c, CLI::App* cmd) {
        if (cmd->count("--budget") == 0) c.budget = env_budget;
    };

    try {
        if (c_energy->parsed() || c_ratio->parsed()) {
            CLI::App* cmd = c_energy->parsed() ? c_energy : c_ratio;
            EnergyOpts& o = *energy_opts;
            apply_env_budget(o.common, cmd);
            RieszKernel kernel(o.s, o.d);
            GridDensity rho = parse_density_grid(o.density, o.d, o.grid);
            SolveOptions opt;
            opt.budget = o.common.budget;
            EnergyReport rep = indirect_energy(rho, o.N, kernel, parse_method(o.method), opt);
            double ratio = lo_ratio(rho, rep, kernel);
            Json j = report_json(rep, o.s, o.d, o.N, rho.size());
            j["lo_ratio"] = ratio;
            j["density"] = density_descriptor(rho, o.s, o.d);
            Json cfg = common_json(o.common);
            cfg["command"] = c_energy->parsed() ? "indirect-energy" : "lo-ratio";
            cfg["s"] = o.s;
            cfg["d"] = o.d;
            cfg["density"] = o.density;
            cfg["N"] = o.N;
            cfg["grid"] = o.grid;
            cfg["method"] = o.method;
            finish_artifact(j, cfg);
            write_file(path_join(o.common.out_dir, c_energy->parsed() ? "report.json" : "lo_ratio.json"),
                       j.dump(2) + "\n");
            if (rep.coupling)
                write_file(path_join(o.common.out_dir, "coupling.csv"), coupling_csv(*rep.coupling));
            return 0;
        }

        if (c_monge->parsed()) {
            apply_env_budget(monge_opts.common, c_monge);
            StepDensity1D rho = parse_density_1d(monge_opts.density);
            Monge1DSolution sol = indirect_energy_1d(rho, monge_opts.N, monge_opts.s);
            Json j = monge_json(sol);
            Json cfg = common_json(monge_opts.common);
            cfg["command"] = "monge1d";
            cfg["s"] = monge_opts.s;
            cfg["N"] = monge_opts.N;
            cfg["density"] = monge_opts.density;
            finish_artifact(j, cfg);
            write_file(path_join(monge_opts.common.out_dir, "monge1d.json"), j.dump(2) + "\n");
            return 0;
        }

        if (c_gc->parsed()) {
            apply_env_budget(gc_opts.common, c_gc);
            RieszKernel kernel(gc_opts.s, gc_opts.d);
            GridDensity rho = parse_density_grid(gc_opts.density, gc_opts.d, gc_opts.grid);
            KernelMatrix K(kernel, rho.geometry());
            SolveOptions opt;
            opt.budget = gc_opts.common.budget;
            GcSolveResult res = gc_indirect_energy(rho, gc_opts.max_n, K, opt);
            Json j = report_json(res.report, gc_opts.s, gc_opts.d, 0, rho.size());
            j["mass"] = rho.total_mass();
            j["state"] = gc_state_json(res.state);
            Json cfg = common_json(gc_opts.common);
            cfg["command"] = "gc-energy";
            cfg["s"] = gc_opts.s;
            cfg["d"] = gc_opts.d;
            cfg["density"] = gc_opts.density;
            cfg["grid"] = gc_opts.grid;
            cfg["max_n"] = gc_opts.max_n;
            finish_artifact(j, cfg);
            write_file(path_join(gc_opts.common.out_dir, "gc_energy.json"), j.dump(2) + "\n");
            return 0;
        }

        if (c_thermo->parsed()) {
            apply_env_budget(thermo_opts.common, c_thermo);
            SolveOptions opt;
            opt.budget = thermo_opts.common.budget;
            ThermoSeries series = thermo_opts.d == 1
                                      ? cube_series_1d(thermo_opts.s, thermo_opts.levels)
                                      : cube_series_3d(thermo_opts.levels, thermo_opts.grid, opt);
            Json j = thermo_summary_json(series);
            if (thermo_opts.d == 3) {
                UegBracket b = ueg_bracket_3d();
                Json jb;
                jb["lower"] = b.lower;
                jb["upper"] = b.upper;
                jb["literature_ball_upper"] = b.literature_ball_upper;
                j["ueg_bracket"] = jb;
            }
            Json cfg = common_json(thermo_opts.common);
            cfg["command"] = "thermo-cubes";
            cfg["s"] = thermo_opts.s;
            cfg["d"] = thermo_opts.d;
            cfg["levels"] = thermo_opts.levels;
            cfg["grid"] = thermo_opts.grid;
            finish_artifact(j, cfg);
            write_file(path_join(thermo_opts.common.out_dir, "thermo.json"), j.dump(2) + "\n");
            write_file(path_join(thermo_opts.common.out_dir, "thermo.csv"), thermo_csv(series));
            if (thermo_opts.common.plot_data) {
                std::string plot = "x,y\n";
                for (const auto& r : series.records)
                    if (r.kind == BoundKind::exact || r.kind == BoundKind::upper_trial)
                        plot += format_double(r.volume) + "," + format_double(r.per_volume_energy) + "\n";
                write_file(path_join(thermo_opts.common.out_dir, "thermo_plot.csv"), plot);
            }
            return 0;
        }

        if (c_lda->parsed()) {
            apply_env_budget(lda_opts.common, c_lda);
            std::vector<int> Ns;
            for (double v : split_numbers(lda_opts.n_list, ',')) Ns.push_back(static_cast<int>(v));
            std::vector<LdaRow> rows;
            if (lda_opts.d == 1) {
                ThermoSeries ref = cube_series_1d(lda_opts.s, lda_opts.levels);
                StepDensity1D base = parse_density_1d(lda_opts.density);
                rows = lda_experiment_1d(base, Ns, lda_opts.s, ref.extrapolated_value);
            } else {
                double efc = floating_crystal_upper_bound(8).e_fc;
                rows = lda_experiment_3d_bounds(Ns, efc);
            }
            std::string csv = "N,value,target,deviation,bound_kind\n";
            for (const auto& r : rows) {
                csv += format_double(r.n_index) + "," + format_double(r.value) + "," +
                       format_double(r.target) + "," + format_double(r.deviation) + "," +
                       r.bound_kind + "\n";
            }
            Json cfg = common_json(lda_opts.common);
            cfg["command"] = "lda-limit";
            cfg["s"] = lda_opts.s;
            cfg["d"] = lda_opts.d;
            cfg["N_list"] = lda_opts.n_list;
            cfg["density"] = lda_opts.density;
            std::string hdr = "# version=" + std::string(kVersion) + "\n# config=" + cfg.dump() + "\n";
            write_file(path_join(lda_opts.common.out_dir, "lda.csv"), hdr + csv);
            return 0;
        }

        if (c_crystal->parsed()) {
            apply_env_budget(crystal_opts.common, c_crystal);
            FloatingCrystalResult fc = floating_crystal_upper_bound(crystal_opts.cutoff, 1.0,
                                                                    crystal_opts.tail_target);
            Json j;
            j["e_fc"] = fc.e_fc;
            j["sum_F"] = fc.sum_F;
            j["tail_bound"] = fc.tail_bound;
            j["fitted_K"] = fc.fitted_K;
            j["cutoff"] = fc.cutoff;
            j["d_cc"] = fc.d_cc;
            Json cfg = common_json(crystal_opts.common);
            cfg["command"] = "floating-crystal";
            cfg["cutoff"] = crystal_opts.cutoff;
            finish_artifact(j, cfg);
            write_file(path_join(crystal_opts.common.out_dir, "floating_crystal.json"),
                       j.dump(2) + "\n");
            return 0;
        }

        if (c_gs->parsed()) {
            apply_env_budget(gs_opts.common, c_gs);
            GSKernel kernel = graf_schenker_kernel(gs_opts.ell, gs_opts.samples, gs_opts.radial,
                                                   gs_opts.common.seed);
            GSDiagnostics diag = gs_positivity_check(kernel);
            Json j = gs_kernel_json(kernel, diag);
            Json cfg = common_json(gs_opts.common);
            cfg["command"] = "gs-kernel";
            cfg["ell"] = gs_opts.ell;
            cfg["samples"] = gs_opts.samples;
            cfg["radial"] = gs_opts.radial;
            finish_artifact(j, cfg);
            write_file(path_join(gs_opts.common.out_dir, "gs_kernel.json"), j.dump(2) + "\n");
            write_file(path_join(gs_opts.common.out_dir, "gs_kernel.csv"), gs_kernel_csv(kernel));
            return 0;
        }

        if (c_quantum->parsed()) {
            apply_env_budget(quantum_opts.common, c_quantum);
            TfDirac tf = tf_dirac_constants(quantum_opts.q);
            double ex_box = exchange_per_volume_box(quantum_opts.box, quantum_opts.q);
            auto cube = make_cube(3, 2.0);
            GridDensity rho = discretize(*cube, quantum_opts.grid, 0.5);
            QuantumBoundReport rep = quasi_free_bound(rho, quantum_opts.hbar2, quantum_opts.q);
            Json j = quantum_json(rep);
            j["c_tf"] = tf.c_tf;
            j["c_d"] = tf.c_d;
            j["box_side"] = quantum_opts.box;
            j["exchange_per_volume_box"] = ex_box;
            j["exchange_deviation_from_c_d"] = std::abs(ex_box - tf.c_d) / tf.c_d;
            Json cfg = common_json(quantum_opts.common);
            cfg["command"] = "quantum-bounds";
            cfg["q"] = quantum_opts.q;
            cfg["hbar2"] = quantum_opts.hbar2;
            cfg["box_side"] = quantum_opts.box;
            cfg["grid"] = quantum_opts.grid;
            finish_artifact(j, cfg);
            write_file(path_join(quantum_opts.common.out_dir, "quantum_bounds.json"),
                       j.dump(2) + "\n");
            return 0;
        }
    } catch (const BudgetError& e) {
        std::cerr << "budget exhausted: " << e.what() << std::endl;
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "constraint violation: " << e.what() << std::endl;
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "constraint violation: " << e.what() << std::endl;
        return 2;
    }
    return 0;
}

} // namespace ueg
