#include <cstdio>
#include <cstdlib>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "amsa/cli.hpp"
#include "amsa/diagnostics.hpp"
#include "amsa/errors.hpp"
#include "amsa/msa.hpp"
#include "amsa/problem.hpp"

namespace amsa::cli {

namespace fs = std::filesystem;

namespace {

ProblemDefinition make_problem(const RunConfig& cfg) {
    if (cfg.problem == "reference") return builtin_paper_test(cfg.alpha, cfg.horizon);
    if (cfg.problem == "semilinear") return builtin_semilinear_test(cfg.horizon);
    throw ConfigError("unknown problem '" + cfg.problem + "'");
}

SolverConfig make_solver_config(const RunConfig& cfg) {
    SolverConfig sc;
    sc.epsilon = cfg.epsilon;
    sc.max_iters = cfg.max_iters;
    sc.minimizer = cfg.minimizer;
    sc.minimizer_mode = cfg.minimizer_mode == "gradient" ? MinimizerMode::gradient : MinimizerMode::automatic;
    sc.stepper.cg_tol = cfg.cg_tol;
    return sc;
}

std::string str(double v) { return format_double(v); }
std::string str(int v) { return std::to_string(v); }
std::string str(std::size_t v) { return std::to_string(v); }

int exit_code(Termination t) {
    switch (t) {
        case Termination::epsilon: return exit_ok;
        case Termination::max_iters: return exit_max_iters;
        case Termination::blow_up: return exit_blow_up;
    }
    return exit_config;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << text;
}

void write_history(const fs::path& path, const RunResult& result) {
    CsvWriter csv(path, {"iter", "J", "dJ", "du_norm_sq", "dv_norm_sq", "max_state", "max_adjoint"});
    for (const IterationRecord& r : result.history) {
        csv.row({str(r.index), str(r.cost), str(r.delta_cost), str(r.du_norm_sq), str(r.dv_norm_sq),
                 str(r.max_state), str(r.max_adjoint)});
    }
}

void write_final_state(const fs::path& path, const Field& y, const Grid& g) {
    CsvWriter csv(path, {"x", "y", "value"});
    for (int i = 0; i <= g.nx(); ++i)
        for (int j = 0; j <= g.ny(); ++j) csv.row({str(g.x(i)), str(g.y(j)), str(y(g.nt(), g.index(i, j)))});
}

void write_distributed(const fs::path& path, const Field& u, const Grid& g) {
    CsvWriter csv(path, {"x", "y", "t", "value"});
    for (int n = 0; n <= g.nt(); ++n)
        for (int i = 0; i <= g.nx(); ++i)
            for (int j = 0; j <= g.ny(); ++j)
                csv.row({str(g.x(i)), str(g.y(j)), str(g.t(n)), str(u(n, g.index(i, j)))});
}

void write_boundary(const fs::path& path, const BoundaryField& v, const Grid& g) {
    CsvWriter csv(path, {"s", "x", "y", "t", "value"});
    const auto nodes = g.boundary();
    for (int n = 0; n <= g.nt(); ++n)
        for (std::size_t b = 0; b < nodes.size(); ++b)
            csv.row({str(nodes[b].s), str(nodes[b].x), str(nodes[b].y), str(g.t(n)), str(v(n, b))});
}

void write_snapshot(const fs::path& path, const Field& y, const Field& u, const Grid& g) {
    CsvWriter csv(path, {"x", "y", "t", "state", "control"});
    for (int n = 0; n <= g.nt(); ++n)
        for (int i = 0; i <= g.nx(); ++i)
            for (int j = 0; j <= g.ny(); ++j) {
                const std::size_t k = g.index(i, j);
                csv.row({str(g.x(i)), str(g.y(j)), str(g.t(n)), str(y(n, k)), str(u(n, k))});
            }
}

/// Runs one AMSA (or basic MSA) job and writes its artifacts into `dir`.
RunResult run_into(const RunConfig& cfg, const fs::path& dir, std::ostream& log) {
    const ProblemDefinition problem = make_problem(cfg);
    if (!problem.u_box.contains(cfg.u0)) throw ConfigError("u0 lies outside the problem's control box");
    if (!problem.v_box.contains(cfg.v0)) throw ConfigError("v0 lies outside the problem's boundary box");
    const Grid g = problem.make_grid(cfg.nx, cfg.ny, cfg.nt);
    const SolverConfig sc = make_solver_config(cfg);

    fs::create_directories(dir);
    write_text(dir / "manifest.txt", manifest(cfg));

    IterationObserver observer;
    if (cfg.snapshot_every > 0) {
        fs::create_directories(dir / "snapshots");
        observer = [&](const IterationRecord& rec, const Field& u, const BoundaryField&, const StateSolution& s) {
            if (rec.index % cfg.snapshot_every != 0) return;
            char name[32];
            std::snprintf(name, sizeof name, "iter_%06d.csv", rec.index);
            write_snapshot(dir / "snapshots" / name, s.y, u, g);
        };
    }

    const Field u0(g, cfg.u0);
    const BoundaryField v0(g, cfg.v0);
    RunResult result = cfg.basic ? run_basic_msa(problem, u0, v0, sc, g, observer)
                                 : run_augmented_msa(problem, u0, v0, cfg.rho, sc, g, observer);

    write_history(dir / "history.csv", result);
    write_final_state(dir / "final_state.csv", result.state.y, g);
    write_distributed(dir / "final_control.csv", result.u, g);
    write_boundary(dir / "final_boundary_control.csv", result.v, g);

    log << (cfg.basic ? "basic MSA" : "augmented MSA") << ": " << result.history.size()
        << " iterations, terminated by " << to_string(result.terminated_by) << ", J0 = " << str(result.initial_cost);
    if (!result.history.empty()) log << ", J = " << str(result.history.back().cost);
    log << '\n';
    return result;
}

std::string rho_directory(double rho) {
    std::string name = "rho_" + format_double(rho);
    for (char& c : name)
        if (c == '-' || c == '+') c = 'm';
    return name;
}

}  // namespace

int cmd_run(const RunConfig& cfg, std::ostream& log) {
    validate(cfg);
    const RunResult result = run_into(cfg, cfg.output_dir, log);
    return exit_code(result.terminated_by);
}

int cmd_sweep(const RunConfig& cfg, std::ostream& log) {
    validate(cfg);
    if (cfg.rhos.empty()) throw ConfigError("sweep needs a nonempty rho list (--rhos)");
    fs::create_directories(cfg.output_dir);
    CsvWriter csv(fs::path(cfg.output_dir) / "sweep.csv",
                  {"rho", "terminated_by", "iterations", "final_J", "fraction_of_descent_steps"});
    for (double rho : cfg.rhos) {
        RunConfig one = cfg;
        one.rho = rho;
        one.rhos.clear();
        const fs::path dir = fs::path(cfg.output_dir) / rho_directory(rho);
        one.output_dir = dir.string();
        log << "rho = " << str(rho) << ": ";
        const RunResult result = run_into(one, dir, log);

        std::size_t descents = 0;
        for (const IterationRecord& r : result.history)
            if (r.delta_cost <= 0.0) ++descents;
        const double fraction =
            result.history.empty() ? 0.0 : static_cast<double>(descents) / static_cast<double>(result.history.size());
        const double final_j = result.history.empty() ? result.initial_cost : result.history.back().cost;
        csv.row({str(rho), to_string(result.terminated_by), str(result.history.size()), str(final_j), str(fraction)});
        csv.flush();
    }
    return exit_ok;
}

int cmd_diagnose(const std::string& suite, const RunConfig& cfg, std::ostream& log) {
    static const std::vector<std::string> suites{"gradient", "stability", "costgap", "convergence"};
    if (std::find(suites.begin(), suites.end(), suite) == suites.end()) {
        throw ConfigError("unknown diagnostics suite '" + suite + "' (gradient, stability, costgap, convergence)");
    }
    validate(cfg);
    const fs::path dir = cfg.output_dir;
    fs::create_directories(dir);
    write_text(dir / "manifest.txt", manifest(cfg));
    bool pass = true;

    if (suite == "convergence") {
        ConvergenceOptions opts;
        opts.stepper.cg_tol = std::min(cfg.cg_tol, 1e-12);
        const ConvergenceReport report = convergence_study(cfg.levels, opts);
        CsvWriter csv(dir / "convergence.csv", {"study", "level", "n", "nt", "h", "dt", "error", "order"});
        auto emit = [&](const char* name, const std::vector<ConvergenceLevel>& levels) {
            for (std::size_t k = 0; k < levels.size(); ++k) {
                const auto& l = levels[k];
                csv.row({name, str(k), str(l.n), str(l.nt), str(l.h), str(l.dt), str(l.error),
                         l.order ? str(*l.order) : std::string()});
            }
        };
        emit("spatial", report.spatial);
        emit("temporal", report.temporal);
        pass = report.min_spatial_order() >= 1.9 && report.min_temporal_order() >= 0.9;
        log << "convergence: spatial order " << str(report.min_spatial_order()) << ", temporal order "
            << str(report.min_temporal_order()) << '\n';
    } else {
        const ProblemDefinition problem = make_problem(cfg);
        const Grid g = problem.make_grid(cfg.nx, cfg.ny, cfg.nt);
        if (suite == "gradient") {
            GradientCheckOptions opts;
            opts.seed = cfg.seed;
            const GradientCheckReport report =
                gradient_check(problem, Field(g, cfg.u0), BoundaryField(g, cfg.v0), g, cfg.directions, opts);
            CsvWriter csv(dir / "gradient.csv", {"direction", "adjoint", "finite_difference", "relative_error"});
            for (const auto& r : report.rows)
                csv.row({str(r.direction), str(r.adjoint), str(r.finite_difference), str(r.relative_error)});
            pass = report.max_relative_error < 1e-4;
            log << "gradient: max relative error " << str(report.max_relative_error) << '\n';
        } else {
            StudyOptions opts;
            opts.samples = cfg.samples;
            opts.seed = cfg.seed;
            const BoundStudy study = suite == "stability" ? study_state_stability(problem, g, opts)
                                                          : study_cost_gap(problem, g, opts);
            CsvWriter csv(dir / (suite + ".csv"), {"amplitude", "sample", "lhs", "rhs", "ratio"});
            for (const auto& level : study.levels)
                for (std::size_t s = 0; s < level.samples.size(); ++s) {
                    const auto& r = level.samples[s];
                    csv.row({str(level.amplitude), str(s), str(r.lhs), str(r.rhs_without_constant), str(r.ratio)});
                }
            pass = study.stable_within(3.0);
            log << suite << ": amplitude spread " << str(study.amplitude_spread) << ", outlier factor "
                << str(study.outlier_factor) << '\n';
        }
    }
    log << suite << ": " << (pass ? "pass" : "fail") << '\n';
    return pass ? exit_ok : exit_check_failed;
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Successive-approximation solvers for parabolic optimal control"};
    app.require_subcommand(1);

    std::string config_path;
    std::map<std::string, std::string> flags;
    bool basic = false;
    std::string suite;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key = value config file");
        for (const std::string& key : config_keys()) {
            if (key == "basic") continue;
            std::string flag = "--" + key;
            for (char& c : flag)
                if (c == '_') c = '-';
            sub->add_option(flag, flags[key], "overrides config key '" + key + "'");
        }
    };

    CLI::App* run = app.add_subcommand("run", "run AMSA (or basic MSA) and write CSV artifacts");
    add_common(run);
    run->add_flag("--basic", basic, "use the basic MSA instead of the augmented one");

    CLI::App* diagnose = app.add_subcommand("diagnose", "run a diagnostics suite");
    add_common(diagnose);
    diagnose->add_option("suite", suite, "gradient | stability | costgap | convergence")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "run AMSA for each rho in --rhos");
    add_common(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    }

    CLI::App* active = app.get_subcommands().front();
    try {
        RunConfig cfg;
        if (!config_path.empty()) apply_config_file(cfg, config_path);
        apply_environment(cfg);
        for (const std::string& key : config_keys()) {
            if (key == "basic") continue;
            std::string flag = "--" + key;
            for (char& c : flag)
                if (c == '_') c = '-';
            if (active->count(flag) > 0) apply_setting(cfg, key, flags[key]);
        }
        if (basic) cfg.basic = true;

        if (active == run) return cmd_run(cfg, out);
        if (active == diagnose) return cmd_diagnose(suite, cfg, out);
        return cmd_sweep(cfg, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    }
}

}  // namespace amsa::cli
