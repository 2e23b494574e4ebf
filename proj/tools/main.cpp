// latimp CLI — lattice generation, detuning sweeps and the batch experiments,
// with CSV/JSON artifacts written to an output directory.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "latimp/dynamics.hpp"
#include "latimp/experiments.hpp"
#include "latimp/io.hpp"

namespace fs = std::filesystem;
using latimp::io::json;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::string format = "csv";
    int threads = 0;
    unsigned seed = 0;  // reserved; all computations are deterministic
};

json load_config(const CommonArgs& args) {
    if (args.config_path.empty()) return json::object();
    std::ifstream in(args.config_path);
    if (!in)
        throw std::invalid_argument("cannot open config file: " +
                                    args.config_path);
    json j;
    in >> j;
    return j;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON config file");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--format", args.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--threads", args.threads, "worker threads (0 = auto)");
    cmd->add_option("--seed", args.seed,
                    "reserved; computations are deterministic");
}

struct LatticeArgs {
    std::string kind;
    std::string placement;
    double spacing = -1.0;
    double theta_pi = -1.0;  // theta in units of pi
    double scale = -1.0;
    int n_atoms = -1;
};

void add_lattice_flags(CLI::App* cmd, LatticeArgs& args) {
    cmd->add_option("--kind", args.kind,
                    "square|triangular|oblique|rectangular|honeycomb");
    cmd->add_option("--placement", args.placement,
                    "interstitial|substitutional");
    cmd->add_option("--spacing", args.spacing, "lattice spacing [lambda]");
    cmd->add_option("--theta-pi", args.theta_pi, "oblique angle / pi");
    cmd->add_option("--scale", args.scale, "rectangular aspect factor");
    cmd->add_option("--n-atoms", args.n_atoms, "total atom count");
}

latimp::LatticeSpec resolve_spec(const json& config, const LatticeArgs& args) {
    latimp::LatticeSpec spec;
    if (config.contains("lattice"))
        spec = latimp::io::lattice_spec_from_json(config.at("lattice"));
    if (!args.kind.empty())
        spec.kind = latimp::lattice_kind_from_string(args.kind);
    if (!args.placement.empty())
        spec.placement = latimp::placement_from_string(args.placement);
    if (args.spacing > 0.0) spec.spacing = args.spacing;
    if (args.theta_pi > 0.0) spec.theta = args.theta_pi * std::numbers::pi;
    if (args.scale > 0.0) spec.scale = args.scale;
    if (args.n_atoms > 0) spec.n_atoms = args.n_atoms;
    return spec;
}

latimp::SweepOptions resolve_sweep(const json& config) {
    if (config.contains("sweep"))
        return latimp::io::sweep_options_from_json(config.at("sweep"));
    return {};
}

latimp::Table1Config resolve_table1(const json& config, int threads) {
    latimp::Table1Config cfg;
    cfg.threads = threads;
    if (!config.contains("table1")) return cfg;
    const json& t = config.at("table1");
    cfg.a_sq = t.value("a_sq", cfg.a_sq);
    cfg.n_atoms = t.value("n_atoms", cfg.n_atoms);
    if (t.contains("theta_frac_pi"))
        cfg.theta = t.at("theta_frac_pi").get<double>() * std::numbers::pi;
    cfg.s = t.value("s", cfg.s);
    cfg.sweep.refine = t.value("refine", cfg.sweep.refine);
    if (t.contains("triangular_spacing")) {
        const auto v = t.at("triangular_spacing").get<std::string>();
        if (v == "cosine")
            cfg.conventions.triangular = latimp::TriangularSpacing::cosine;
        else if (v == "cosine_squared")
            cfg.conventions.triangular =
                latimp::TriangularSpacing::cosine_squared;
        else
            throw std::invalid_argument("triangular_spacing: " + v);
    }
    if (t.contains("substitutional_spacing")) {
        const auto v = t.at("substitutional_spacing").get<std::string>();
        if (v == "rescaled")
            cfg.conventions.substitutional =
                latimp::SubstitutionalSpacing::rescaled;
        else if (v == "reference")
            cfg.conventions.substitutional =
                latimp::SubstitutionalSpacing::reference;
        else
            throw std::invalid_argument("substitutional_spacing: " + v);
    }
    cfg.conventions.gamma_I = t.value("gamma_I", cfg.conventions.gamma_I);
    return cfg;
}

int run_generate(const CommonArgs& common, const LatticeArgs& lattice) {
    const json config = load_config(common);
    const latimp::LatticeSpec spec = resolve_spec(config, lattice);
    const latimp::EmitterArray array = latimp::build_lattice(spec);
    const fs::path out(common.out_dir);
    if (common.format == "csv")
        latimp::io::write_text(out / "lattice.csv",
                               latimp::io::lattice_to_csv(array));
    latimp::io::write_json(out / "lattice.json",
                           latimp::io::lattice_to_json(spec, array));
    std::cout << "wrote " << (out / "lattice.json").string() << " ("
              << array.lattice_positions.size() << " sites)\n";
    return 0;
}

int run_sweep(const CommonArgs& common, const LatticeArgs& lattice,
              bool direct_solve, bool dump_matrix) {
    const json config = load_config(common);
    const latimp::LatticeSpec spec = resolve_spec(config, lattice);
    latimp::EmitterArray array = latimp::build_lattice(spec);
    array.gamma_I = config.value("gamma_I", 1.0);
    latimp::CouplingSystem system = latimp::assemble_system(array);
    const latimp::SweepOptions opt = resolve_sweep(config);
    const latimp::SweepCurve curve = direct_solve
                                         ? latimp::detuning_sweep(system, opt)
                                         : latimp::eigen_sweep(system, opt);
    const fs::path out(common.out_dir);
    if (common.format == "csv")
        latimp::io::write_text(out / "sweep.csv",
                               latimp::io::sweep_to_csv(curve));
    latimp::io::write_json(out / "sweep.json",
                           latimp::io::sweep_sidecar_json(curve));
    if (dump_matrix)
        latimp::io::write_json(out / "matrix.json",
                               latimp::io::matrix_dump_json(system));
    std::cout << "minimum gamma_eff = " << curve.gamma_min
              << " at delta_LI = " << curve.delta_min << "\n";
    return 0;
}

int run_table1_cmd(const CommonArgs& common) {
    const json config = load_config(common);
    const latimp::Table1Config cfg = resolve_table1(config, common.threads);
    const auto records = latimp::run_table1(cfg);
    const fs::path out(common.out_dir);
    latimp::io::write_json(out / "table1.json",
                           latimp::io::table1_report_json(records));
    bool any_failed = false;
    for (const auto& rec : records) {
        if (!rec.error.empty()) {
            any_failed = true;
            std::cerr << rec.label << ": " << rec.error << "\n";
            continue;
        }
        std::cout << rec.label << ": N_nn=" << rec.n_nn << " N_d=" << rec.n_d
                  << " gamma_min=" << rec.gamma_eff_min
                  << " d_BE=" << (rec.d_be ? std::to_string(*rec.d_be) : "n/a")
                  << "\n";
    }
    return any_failed ? 3 : 0;
}

int run_vacancy_cmd(const CommonArgs& common) {
    const json config = load_config(common);
    latimp::VacancyScanConfig cfg;
    cfg.threads = common.threads;
    if (config.contains("vacancy")) {
        const json& v = config.at("vacancy");
        cfg.a = v.value("a", cfg.a);
        cfg.n_atoms = v.value("n_atoms", cfg.n_atoms);
        cfg.gamma_I = v.value("gamma_I", cfg.gamma_I);
        if (v.contains("offsets")) {
            cfg.offsets.clear();
            for (const auto& o : v.at("offsets"))
                cfg.offsets.emplace_back(o.at(0).get<double>(),
                                         o.at(1).get<double>());
        }
    }
    if (config.contains("sweep"))
        cfg.sweep = latimp::io::sweep_options_from_json(config.at("sweep"));
    cfg.sweep.refine = false;
    const auto result = latimp::run_vacancy_scan(cfg);
    const fs::path out(common.out_dir);
    latimp::io::write_json(out / "vacancy.json",
                           latimp::io::vacancy_report_json(result));
    if (common.format == "csv")
        for (size_t i = 0; i < result.curves.size(); ++i)
            latimp::io::write_text(
                out / ("vacancy_curve_" + std::to_string(i) + ".csv"),
                latimp::io::sweep_to_csv(result.curves[i]));
    for (size_t i = 0; i < result.curves.size(); ++i)
        std::cout << "p" << i + 1
                  << ": delta_min=" << result.curves[i].delta_min
                  << " gamma_min=" << result.curves[i].gamma_min << "\n";
    return 0;
}

int run_posmap_cmd(const CommonArgs& common, const LatticeArgs& lattice) {
    const json config = load_config(common);
    latimp::PositionMapConfig cfg;
    cfg.spec = resolve_spec(config, lattice);
    cfg.threads = common.threads;
    if (config.contains("posmap")) {
        const json& p = config.at("posmap");
        cfg.grid_n = p.value("grid_n", cfg.grid_n);
        cfg.gamma_I = p.value("gamma_I", cfg.gamma_I);
        cfg.sweep.refine = p.value("refine", cfg.sweep.refine);
    }
    if (config.contains("sweep"))
        cfg.sweep = latimp::io::sweep_options_from_json(config.at("sweep"));
    const auto map = latimp::run_position_map(cfg);
    const fs::path out(common.out_dir);
    if (common.format == "csv") {
        latimp::io::write_text(out / "posmap.csv",
                               latimp::io::position_map_to_csv(map));
        latimp::io::write_text(out / "posmap_cut.csv",
                               latimp::io::position_map_cut_csv(map));
    }
    latimp::io::write_json(out / "posmap.json",
                           latimp::io::position_map_json(map));
    std::cout << map.optima.size() << " optimal position(s)\n";
    return 0;
}

int run_plaquette_cmd(const CommonArgs& common) {
    const json config = load_config(common);
    double tmin = 0.05 * std::numbers::pi, tmax = 0.95 * std::numbers::pi;
    int n = 19;
    double a_sq = 0.15;
    if (config.contains("plaquette")) {
        const json& p = config.at("plaquette");
        if (p.contains("theta_min_frac_pi"))
            tmin = p.at("theta_min_frac_pi").get<double>() * std::numbers::pi;
        if (p.contains("theta_max_frac_pi"))
            tmax = p.at("theta_max_frac_pi").get<double>() * std::numbers::pi;
        n = p.value("n", n);
        a_sq = p.value("a_sq", a_sq);
    }
    const auto rows = latimp::run_plaquette_couplings(tmin, tmax, n, a_sq);
    latimp::io::write_text(fs::path(common.out_dir) / "plaquette_couplings.csv",
                           latimp::io::plaquette_couplings_csv(rows));
    std::cout << rows.size() << " rows\n";
    return 0;
}

int run_dynamics_cmd(const CommonArgs& common, const LatticeArgs& lattice) {
    const json config = load_config(common);
    const latimp::LatticeSpec spec = resolve_spec(config, lattice);
    double delta = 0.0, gamma_I = 1e-2, t_max = 200.0, dt = 0.0;
    int store_stride = 1;
    bool store_lattice = false;
    if (config.contains("dynamics")) {
        const json& d = config.at("dynamics");
        delta = d.value("delta", delta);
        gamma_I = d.value("gamma_I", gamma_I);
        t_max = d.value("t_max", t_max);
        dt = d.value("dt", dt);
        store_stride = d.value("store_stride", store_stride);
        store_lattice = d.value("store_lattice", store_lattice);
    }
    latimp::EmitterArray array = latimp::build_lattice(spec);
    array.gamma_I = gamma_I;
    latimp::CouplingSystem system = latimp::assemble_system(array);
    latimp::ensure_eigen_cache(system);
    if (dt <= 0.0) {
        double radius = 0.0;
        for (Eigen::Index k = 0; k < system.eigen_cache->eigenvalues.size(); ++k)
            radius = std::max(radius,
                              std::abs(system.eigen_cache->eigenvalues(k) -
                                       latimp::Complex(delta, 0.5)));
        dt = 0.05 / std::max(radius, system.gamma_L);
    }
    const latimp::Trajectory traj = latimp::integrate_amplitudes(
        system, delta, gamma_I, t_max, dt, {store_stride, store_lattice});
    const fs::path out(common.out_dir);
    latimp::io::write_text(out / "trajectory.csv",
                           latimp::io::trajectory_to_csv(traj, store_lattice));
    json summary{{"delta", delta},
                 {"gamma_I", gamma_I},
                 {"dt", dt},
                 {"t_max", t_max},
                 {"final_population", traj.total_excitation.back()}};
    try {
        summary["fitted_decay_rate"] = latimp::fit_decay_rate(traj);
    } catch (const std::exception& e) {
        summary["fit_error"] = e.what();
    }
    const latimp::SelfEnergy sigma = latimp::self_energy(system, delta);
    summary["gamma_eff"] = latimp::effective_decay(gamma_I, sigma);
    summary["collective_shift"] = latimp::collective_shift(sigma);
    latimp::io::write_json(out / "dynamics.json", summary);
    std::cout << "trajectory with " << traj.times.size() << " samples\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"impurity decay in dipole-coupled two-dimensional emitter arrays"};
    app.require_subcommand(1);

    CommonArgs common;
    LatticeArgs lattice;
    bool direct_solve = false;
    bool dump_matrix = false;

    auto* generate = app.add_subcommand("generate", "build a lattice and export it");
    add_common(generate, common);
    add_lattice_flags(generate, lattice);

    auto* sweep = app.add_subcommand("sweep", "effective decay vs detuning");
    add_common(sweep, common);
    add_lattice_flags(sweep, lattice);
    sweep->add_flag("--direct", direct_solve,
                    "per-point dense solves instead of the eigen cache");
    sweep->add_flag("--dump-matrix", dump_matrix,
                    "also write the system matrices as JSON");

    auto* table1 = app.add_subcommand("table1", "ten-case geometry comparison");
    add_common(table1, common);

    auto* vacancy = app.add_subcommand("vacancy-scan",
                                       "square lattice with a vacancy, "
                                       "impurity marched into it");
    add_common(vacancy, common);

    auto* posmap = app.add_subcommand("posmap", "optimal-placement map over a plaquette");
    add_common(posmap, common);
    add_lattice_flags(posmap, lattice);

    auto* plaquette = app.add_subcommand("plaquette-couplings",
                                         "oblique plaquette distances and couplings vs theta");
    add_common(plaquette, common);

    auto* dynamics = app.add_subcommand("dynamics", "single-excitation time evolution");
    add_common(dynamics, common);
    add_lattice_flags(dynamics, lattice);

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return run_generate(common, lattice);
        if (sweep->parsed()) return run_sweep(common, lattice, direct_solve, dump_matrix);
        if (table1->parsed()) return run_table1_cmd(common);
        if (vacancy->parsed()) return run_vacancy_cmd(common);
        if (posmap->parsed()) return run_posmap_cmd(common, lattice);
        if (plaquette->parsed()) return run_plaquette_cmd(common);
        if (dynamics->parsed()) return run_dynamics_cmd(common, lattice);
    } catch (const latimp::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const latimp::io::json::exception& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
