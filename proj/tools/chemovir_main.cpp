#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include <nlohmann/json.hpp>

#include "chemovir/config.hpp"
#include "chemovir/output.hpp"

namespace fs = std::filesystem;

namespace {

using namespace chemovir;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitIo = 4;

std::string run_dir_name(int index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "run_%03d", index);
    return buf;
}

nlohmann::ordered_json outcome_json(const RunOutcome& outcome) {
    nlohmann::ordered_json j;
    j["classification"] = to_string(outcome.classification);
    j["termination"] = to_string(outcome.termination);
    j["t_detect"] = outcome.t_detect;
    j["dt_collapsed"] = outcome.dt_collapsed;
    j["peaks"] = {{"linf_u", outcome.peak_linf_u},
                  {"grad_v_lq", outcome.peak_grad_v_lq},
                  {"linf_w", outcome.peak_linf_w}};
    j["plateau_ratio"] = outcome.plateau_ratio;
    return j;
}

int run_simulate(const std::string& config_path, const std::string& dir_override,
                 bool quiet) {
    RunConfig cfg = load_run_config(config_path);
    if (!dir_override.empty()) cfg.output.directory = dir_override;
    const fs::path dir(cfg.output.directory);
    fs::create_directories(dir);

    int snapshot_index = 0;
    std::function<void(const State&)> sink;
    if (cfg.output.snapshots)
        sink = [&](const State& s) {
            char name[32];
            std::snprintf(name, sizeof name, "snapshot_%04d.csv", snapshot_index++);
            write_text_file(dir / name, snapshot_csv(s));
        };

    const RunRecord rec = execute_run(cfg.setup, sink);

    write_text_file(dir / "config_echo.ini", serialize_run_config(cfg));
    write_text_file(dir / "diagnostics.csv", diagnostics_csv(rec.series));
    write_text_file(dir / "summary.json", run_summary_json(cfg, rec));
    if (cfg.output.svg)
        write_text_file(dir / "monitors.svg", monitors_svg(rec.series));

    if (!quiet) {
        std::cout << "classification: " << to_string(rec.outcome.classification)
                  << " (termination " << to_string(rec.outcome.termination);
        if (rec.outcome.classification == Classification::BlowUp)
            std::cout << " at t=" << format_double(rec.outcome.t_detect)
                      << (rec.outcome.dt_collapsed ? ", dt collapsed" : "");
        std::cout << ")\n"
                  << "steps: " << rec.steps << " (+" << rec.rejections
                  << " rejected), rows: " << rec.series.size() << "\n"
                  << "artifacts: " << dir.string() << "\n";
    }
    return rec.outcome.classification == Classification::Diverged ? kExitDiverged
                                                                  : kExitOk;
}

int run_sweep_cmd(const std::string& config_path, const std::string& dir_override,
                  bool quiet) {
    RunConfig cfg = load_run_config(config_path);
    if (!cfg.sweep)
        throw ConfigError(config_path + ": sweep requires a [sweep] section");
    if (!dir_override.empty()) cfg.output.directory = dir_override;
    const fs::path dir(cfg.output.directory);
    fs::create_directories(dir);

    SweepSpec spec;
    spec.base = cfg.setup;
    spec.alpha_values = cfg.sweep->alpha_values.empty()
                            ? std::vector<double>{cfg.setup.model.conversion.alpha}
                            : cfg.sweep->alpha_values;
    spec.kappa_values = cfg.sweep->kappa_values.empty()
                            ? std::vector<double>{cfg.setup.model.kappa}
                            : cfg.sweep->kappa_values;
    spec.seeds = cfg.sweep->seeds;

    const SweepResult result = run_sweep(spec);

    write_text_file(dir / "config_echo.ini", serialize_run_config(cfg));
    write_text_file(dir / "sweep_summary.csv", sweep_summary_csv(result));
    for (size_t i = 0; i < result.entries.size(); ++i) {
        const auto& entry = result.entries[i];
        const fs::path run_dir = dir / run_dir_name(static_cast<int>(i));
        fs::create_directories(run_dir);
        write_text_file(run_dir / "diagnostics.csv", diagnostics_csv(entry.series));
        nlohmann::ordered_json j;
        j["alpha"] = entry.alpha;
        j["kappa"] = entry.kappa;
        j["seed"] = entry.seed;
        j.update(outcome_json(entry.outcome));
        write_text_file(run_dir / "summary.json", j.dump(2) + "\n");
    }

    if (cfg.sweep->estimate_critical) {
        const CriticalAlphaResult crit = estimate_critical_alpha(
            cfg.setup, cfg.sweep->bracket_lo, cfg.sweep->bracket_hi,
            cfg.sweep->iterations);
        nlohmann::ordered_json j;
        j["estimate"] = crit.estimate;
        j["bracket_lo"] = crit.lo;
        j["bracket_hi"] = crit.hi;
        auto& probes = j["probes"] = nlohmann::ordered_json::array();
        for (const auto& [alpha, blew_up] : crit.probes)
            probes.push_back({{"alpha", alpha}, {"blew_up", blew_up}});
        write_text_file(dir / "critical_alpha.json", j.dump(2) + "\n");
        if (!quiet)
            std::cout << "critical exponent estimate: " << format_double(crit.estimate)
                      << " in [" << format_double(crit.lo) << ", "
                      << format_double(crit.hi) << "]\n";
    }

    if (!quiet) {
        for (const auto& entry : result.entries)
            std::cout << "alpha=" << format_double(entry.alpha)
                      << " kappa=" << format_double(entry.kappa)
                      << " seed=" << entry.seed << " -> "
                      << to_string(entry.outcome.classification) << "\n";
        std::cout << "artifacts: " << dir.string() << "\n";
    }
    return kExitOk;
}

int run_converge(const std::string& kind_name, int levels,
                 const std::string& dir_override, bool quiet) {
    StudyKind kind;
    std::string file;
    if (kind_name == "laplacian_eigen") {
        kind = StudyKind::LaplacianEigen;
        file = "convergence_laplacian_eigen.csv";
    } else if (kind_name == "w_equation") {
        kind = StudyKind::WEquationTime;
        file = "convergence_w_equation.csv";
    } else if (kind_name == "w_equation_space") {
        kind = StudyKind::WEquationSpace;
        file = "convergence_w_equation_space.csv";
    } else if (kind_name == "mass_ode") {
        kind = StudyKind::MassODE;
        file = "convergence_mass_ode.csv";
    } else {
        throw ConfigError("unknown study kind '" + kind_name +
                          "' (one of: laplacian_eigen, w_equation, "
                          "w_equation_space, mass_ode)");
    }

    const auto rows = convergence_study(kind, levels);
    const fs::path dir(dir_override.empty() ? "out" : dir_override);
    fs::create_directories(dir);
    write_text_file(dir / file, study_csv(rows));

    if (!quiet) {
        std::cout << "h,error,observed_order\n";
        for (const auto& r : rows) {
            std::cout << format_double(r.h) << "," << format_double(r.error) << ",";
            if (r.observed_order) std::cout << format_double(*r.observed_order);
            std::cout << "\n";
        }
        std::cout << "artifacts: " << (dir / file).string() << "\n";
    }
    return kExitOk;
}

int run_equilibria(const std::string& config_path, const std::string& dir_override,
                   bool quiet) {
    RunConfig cfg = load_run_config(config_path);
    cfg.setup.model.validate();
    const auto states = homogeneous_equilibria(cfg.setup.model);

    if (!dir_override.empty()) cfg.output.directory = dir_override;
    const fs::path dir(cfg.output.directory);
    fs::create_directories(dir);
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& s : states)
        j.push_back({{"u", s[0]}, {"v", s[1]}, {"w", s[2]}});
    write_text_file(dir / "equilibria.json", j.dump(2) + "\n");

    if (!quiet) {
        for (const auto& s : states)
            std::cout << "(" << format_double(s[0]) << ", " << format_double(s[1])
                      << ", " << format_double(s[2]) << ")\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"virus-infection chemotaxis simulation laboratory"};
    app.require_subcommand(1);

    std::string output_dir;
    bool quiet = false;
    app.add_option("--output-dir", output_dir, "override the artifact directory");
    app.add_flag("--quiet", quiet, "suppress progress output");

    std::string sim_config, sweep_config, eq_config, study_kind;
    int levels = 3;

    auto* sim = app.add_subcommand("simulate", "run one simulation from a config file");
    sim->add_option("config", sim_config, "configuration file")->required();

    auto* swp = app.add_subcommand("sweep", "run a parameter sweep from a config file");
    swp->add_option("config", sweep_config, "configuration file with a [sweep] section")
        ->required();

    auto* cnv = app.add_subcommand("converge", "run a convergence study");
    cnv->add_option("kind", study_kind,
                    "laplacian_eigen | w_equation | w_equation_space | mass_ode")
        ->required();
    cnv->add_option("--levels", levels, "refinement levels (default 3)");

    auto* eqc = app.add_subcommand("equilibria", "list spatially constant steady states");
    eqc->add_option("config", eq_config, "configuration file with a [model] section")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return run_simulate(sim_config, output_dir, quiet);
        if (swp->parsed()) return run_sweep_cmd(sweep_config, output_dir, quiet);
        if (cnv->parsed()) return run_converge(study_kind, levels, output_dir, quiet);
        if (eqc->parsed()) return run_equilibria(eq_config, output_dir, quiet);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const TooFewSamples& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitDiverged;
    }
    return kExitOk;
}
