#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "amsa/cli.hpp"

using namespace amsa::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("amsa_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

int invoke(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
    args.insert(args.begin(), "amsa");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

std::vector<std::string> coarse(const fs::path& dir) {
    return {"--nx", "20", "--ny", "20", "--nt", "25", "--output-dir", dir.string()};
}

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

TEST(FormatDouble, ShortestRoundTrip) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(-2.0), "-2");
    EXPECT_EQ(format_double(1e-300), "1e-300");
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-1e6, 1e6);
    for (int k = 0; k < 1000; ++k) {
        const double x = d(rng) * std::pow(10.0, k % 40 - 20);
        EXPECT_EQ(std::stod(format_double(x)), x);
    }
}

TEST(CsvWriter, HeaderAndLineFeeds) {
    const fs::path dir = scratch("csv");
    fs::create_directories(dir);
    {
        CsvWriter w(dir / "a.csv", {"a", "b"});
        w.row({"1", "2"});
        EXPECT_THROW(w.row({"1"}), std::logic_error);
    }
    EXPECT_EQ(slurp(dir / "a.csv"), "a,b\n1,2\n");
}

TEST(Config, ParsesKeyValueTextWithComments) {
    RunConfig cfg;
    apply_config_text(cfg, "# experiment\nnx = 12  # trailing\n\n  rho=2.5\nproblem = semilinear\nrhos = 0, 1,2\nbasic = true\n");
    EXPECT_EQ(cfg.nx, 12);
    EXPECT_EQ(cfg.rho, 2.5);
    EXPECT_EQ(cfg.problem, "semilinear");
    EXPECT_EQ(cfg.rhos, (std::vector<double>{0, 1, 2}));
    EXPECT_TRUE(cfg.basic);
}

TEST(Config, RejectsMalformedInput) {
    RunConfig cfg;
    EXPECT_THROW(apply_config_text(cfg, "nx 12\n"), ConfigError);
    EXPECT_THROW(apply_config_text(cfg, "colour = red\n"), ConfigError);
    EXPECT_THROW(apply_config_text(cfg, "nx = 1.5\n"), ConfigError);
    EXPECT_THROW(apply_config_text(cfg, "rho = fast\n"), ConfigError);
    EXPECT_THROW(apply_config_text(cfg, "basic = maybe\n"), ConfigError);
    EXPECT_THROW(apply_config_file(cfg, "/nonexistent/amsa.cfg"), ConfigError);
}

TEST(Config, RangeChecks) {
    RunConfig ok;
    EXPECT_NO_THROW(validate(ok));
    auto broken = [](auto edit) {
        RunConfig c;
        edit(c);
        return c;
    };
    EXPECT_THROW(validate(broken([](RunConfig& c) { c.rho = -1; })), ConfigError);
    EXPECT_THROW(validate(broken([](RunConfig& c) { c.epsilon = 0; })), ConfigError);
    EXPECT_THROW(validate(broken([](RunConfig& c) { c.nx = 3; })), ConfigError);
    EXPECT_THROW(validate(broken([](RunConfig& c) { c.max_iters = 0; })), ConfigError);
    EXPECT_THROW(validate(broken([](RunConfig& c) { c.problem = "nope"; })), ConfigError);
    EXPECT_THROW(validate(broken([](RunConfig& c) { c.minimizer.decay = 1.5; })), ConfigError);
    EXPECT_THROW(validate(broken([](RunConfig& c) { c.levels = 1; })), ConfigError);
}

TEST(Config, EnvironmentOverrides) {
    RunConfig cfg;
    apply_environment(cfg, [](const char* name) -> const char* {
        const std::string n = name;
        if (n == "AMSA_NX") return "16";
        if (n == "AMSA_MAX_ITERS") return "7";
        return nullptr;
    });
    EXPECT_EQ(cfg.nx, 16);
    EXPECT_EQ(cfg.max_iters, 7);
    EXPECT_EQ(cfg.ny, 100);
}

TEST(Config, ManifestRoundTrips) {
    RunConfig cfg;
    cfg.nx = 17;
    cfg.rho = 0.1 + 0.2;
    cfg.rhos = {0.5, 1.0 / 3.0};
    cfg.basic = true;
    cfg.minimizer.initial_lr = 0.07;
    RunConfig back;
    apply_config_text(back, manifest(cfg));
    EXPECT_EQ(manifest(back), manifest(cfg));
    EXPECT_EQ(back.rho, cfg.rho);
    EXPECT_EQ(back.rhos, cfg.rhos);
    for (const std::string& key : config_keys()) EXPECT_NE(manifest(cfg).find(key + " = "), std::string::npos) << key;
}

TEST(Config, PrecedenceFileEnvFlag) {
    const fs::path dir = scratch("precedence");
    fs::create_directories(dir);
    std::ofstream(dir / "c.cfg") << "nx = 6\nny = 6\nnt = 6\nmax_iters = 3\nepsilon = 1e-30\n";
    setenv("AMSA_MAX_ITERS", "2", 1);
    const int code = invoke({"run", "--config", (dir / "c.cfg").string(), "--ny", "8", "--output-dir", (dir / "o").string()});
    unsetenv("AMSA_MAX_ITERS");
    EXPECT_EQ(code, exit_max_iters);
    RunConfig resolved;
    apply_config_file(resolved, dir / "o" / "manifest.txt");
    EXPECT_EQ(resolved.nx, 6);         // file
    EXPECT_EQ(resolved.max_iters, 2);  // environment beats file
    EXPECT_EQ(resolved.ny, 8);         // flag beats file
    EXPECT_EQ(read_csv(dir / "o" / "history.csv").size(), 3u);
}

TEST(CmdRun, ReferenceCoarseConfigTerminatesByEpsilon) {
    const fs::path dir = scratch("run");
    ASSERT_EQ(invoke(with({"run"}, coarse(dir))), exit_ok);
    const auto rows = read_csv(dir / "history.csv");
    ASSERT_GE(rows.size(), 2u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"iter", "J", "dJ", "du_norm_sq", "dv_norm_sq", "max_state", "max_adjoint"}));
    for (std::size_t k = 1; k < rows.size(); ++k) {
        EXPECT_EQ(rows[k][0], std::to_string(k));
        EXPECT_LE(std::stod(rows[k][2]), 0.0);
    }
    for (std::size_t k = 2; k < rows.size(); ++k)
        EXPECT_NEAR(std::stod(rows[k][2]), std::stod(rows[k][1]) - std::stod(rows[k - 1][1]), 1e-12);

    const auto state = read_csv(dir / "final_state.csv");
    EXPECT_EQ(state[0], (std::vector<std::string>{"x", "y", "value"}));
    EXPECT_EQ(state.size(), 1u + 21u * 21u);
    const auto control = read_csv(dir / "final_control.csv");
    EXPECT_EQ(control[0], (std::vector<std::string>{"x", "y", "t", "value"}));
    EXPECT_EQ(control.size(), 1u + 26u * 21u * 21u);
    const auto boundary = read_csv(dir / "final_boundary_control.csv");
    EXPECT_EQ(boundary.size(), 1u + 26u * 80u);
    EXPECT_TRUE(fs::exists(dir / "manifest.txt"));
    EXPECT_EQ(slurp(dir / "history.csv").find('\r'), std::string::npos);
}

TEST(CmdRun, MaxItersCutoff) {
    const fs::path dir = scratch("cutoff");
    EXPECT_EQ(invoke(with({"run", "--max-iters", "1"}, coarse(dir))), exit_max_iters);
    EXPECT_EQ(read_csv(dir / "history.csv").size(), 2u);
}

TEST(CmdRun, MalformedConfig) {
    const fs::path dir = scratch("malformed");
    fs::create_directories(dir);
    std::ofstream(dir / "bad.cfg") << "nx = twenty\n";
    std::string err;
    EXPECT_EQ(invoke({"run", "--config", (dir / "bad.cfg").string()}, nullptr, &err), exit_config);
    EXPECT_NE(err.find("nx"), std::string::npos);
    EXPECT_EQ(invoke({"run", "--config", (dir / "missing.cfg").string()}), exit_config);
    EXPECT_EQ(invoke({"run", "--rho", "-1"}), exit_config);
    EXPECT_EQ(invoke({"run", "--no-such-flag", "1"}), exit_config);
}

TEST(CmdRun, BasicMethodBlowUpExitCode) {
    const fs::path dir = scratch("basic");
    EXPECT_EQ(invoke(with({"run", "--basic"}, coarse(dir))), exit_blow_up);
    RunConfig resolved;
    apply_config_file(resolved, dir / "manifest.txt");
    EXPECT_TRUE(resolved.basic);
}

TEST(CmdRun, SnapshotsCarryTime) {
    const fs::path dir = scratch("snapshots");
    ASSERT_EQ(invoke({"run", "--snapshot-every", "2", "--max-iters", "4", "--epsilon", "1e-30", "--nx", "6", "--ny", "6",
                      "--nt", "5", "--output-dir", dir.string()}),
              exit_max_iters);
    EXPECT_TRUE(fs::exists(dir / "snapshots" / "iter_000002.csv"));
    EXPECT_TRUE(fs::exists(dir / "snapshots" / "iter_000004.csv"));
    EXPECT_FALSE(fs::exists(dir / "snapshots" / "iter_000003.csv"));
    const auto rows = read_csv(dir / "snapshots" / "iter_000002.csv");
    EXPECT_EQ(rows[0], (std::vector<std::string>{"x", "y", "t", "state", "control"}));
    EXPECT_EQ(rows.size(), 1u + 6u * 49u);
}

TEST(CmdRun, DeterministicAndReproducibleFromManifest) {
    const fs::path a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
    ASSERT_EQ(invoke({"run", "--problem", "semilinear", "--nx", "8", "--ny", "8", "--nt", "6", "--output-dir", a.string()}), exit_ok);
    ASSERT_EQ(invoke({"run", "--problem", "semilinear", "--nx", "8", "--ny", "8", "--nt", "6", "--output-dir", b.string()}), exit_ok);
    ASSERT_EQ(invoke({"run", "--config", (a / "manifest.txt").string(), "--output-dir", c.string()}), exit_ok);
    for (const char* name : {"history.csv", "final_state.csv", "final_control.csv", "final_boundary_control.csv"}) {
        EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
        EXPECT_EQ(slurp(a / name), slurp(c / name)) << name;
    }
}

TEST(CmdDiagnose, GradientSuite) {
    const fs::path dir = scratch("diag_gradient");
    std::string out;
    EXPECT_EQ(invoke({"diagnose", "gradient", "--nx", "10", "--ny", "10", "--nt", "10", "--output-dir", dir.string()}, &out), exit_ok);
    const auto rows = read_csv(dir / "gradient.csv");
    ASSERT_EQ(rows.size(), 6u);
    for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_LT(std::stod(rows[k][3]), 1e-4);
    EXPECT_NE(out.find("pass"), std::string::npos);
}

TEST(CmdDiagnose, ConvergenceSuite) {
    const fs::path dir = scratch("diag_convergence");
    EXPECT_EQ(invoke({"diagnose", "convergence", "--levels", "3", "--output-dir", dir.string()}), exit_ok);
    const auto rows = read_csv(dir / "convergence.csv");
    ASSERT_EQ(rows.size(), 7u);
    for (std::size_t k = 1; k < rows.size(); ++k) {
        if (rows[k][7].empty()) continue;
        const double order = std::stod(rows[k][7]);
        if (rows[k][0] == "spatial") {
            EXPECT_GE(order, 1.9);
            EXPECT_LE(order, 2.1);
        } else {
            EXPECT_GE(order, 0.9);
            EXPECT_LE(order, 1.1);
        }
    }
}

TEST(CmdDiagnose, BoundSuites) {
    for (const char* suite : {"stability", "costgap"}) {
        const fs::path dir = scratch(std::string("diag_") + suite);
        EXPECT_EQ(invoke({"diagnose", suite, "--samples", "5", "--nx", "6", "--ny", "6", "--nt", "6", "--output-dir", dir.string()}), exit_ok)
            << suite;
        EXPECT_EQ(read_csv(dir / (std::string(suite) + ".csv")).size(), 1u + 15u) << suite;
    }
}

TEST(CmdDiagnose, UnknownSuite) {
    std::string err;
    EXPECT_EQ(invoke({"diagnose", "foo", "--output-dir", scratch("diag_foo").string()}, nullptr, &err), exit_config);
    EXPECT_NE(err.find("foo"), std::string::npos);
}

TEST(CmdSweep, PenaltyListOnReferenceProblem) {
    const fs::path dir = scratch("sweep");
    ASSERT_EQ(invoke(with({"sweep", "--rhos", "0,1", "--max-iters", "60"}, coarse(dir))), exit_ok);
    const auto rows = read_csv(dir / "sweep.csv");
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"rho", "terminated_by", "iterations", "final_J", "fraction_of_descent_steps"}));
    EXPECT_EQ(rows[1][0], "0");
    EXPECT_EQ(rows[2][0], "1");
    EXPECT_EQ(rows[2][1], "epsilon");
    EXPECT_EQ(std::stod(rows[2][4]), 1.0);
}

TEST(CmdSweep, EmptyListFails) {
    EXPECT_EQ(invoke({"sweep", "--output-dir", scratch("sweep_empty").string()}), exit_config);
    EXPECT_EQ(invoke({"sweep", "--rhos", "", "--output-dir", scratch("sweep_empty2").string()}), exit_config);
}

TEST(CmdSweep, SingleRhoMatchesRun) {
    const fs::path s = scratch("sweep_single"), r = scratch("sweep_run");
    ASSERT_EQ(invoke(with({"sweep", "--rhos", "2"}, coarse(s))), exit_ok);
    ASSERT_EQ(invoke(with({"run", "--rho", "2"}, coarse(r))), exit_ok);
    for (const char* name : {"history.csv", "final_state.csv", "final_control.csv"})
        EXPECT_EQ(slurp(s / "rho_2" / name), slurp(r / name)) << name;
}

TEST(Binary, ExitCodesThroughTheProcess) {
    const char* tool = std::getenv("AMSA_TOOL");
    if (!tool) GTEST_SKIP() << "AMSA_TOOL not set";
    const fs::path dir = scratch("binary");
    const std::string base = std::string(tool) + " run --nx 8 --ny 8 --nt 5 --output-dir " + dir.string() + " > /dev/null 2>&1";
    EXPECT_EQ(WEXITSTATUS(std::system(base.c_str())), 0);
    const std::string cut = std::string(tool) + " run --nx 8 --ny 8 --nt 5 --max-iters 1 --output-dir " + dir.string() + " > /dev/null 2>&1";
    EXPECT_EQ(WEXITSTATUS(std::system(cut.c_str())), 2);
    const std::string bad = std::string(tool) + " diagnose foo > /dev/null 2>&1";
    EXPECT_EQ(WEXITSTATUS(std::system(bad.c_str())), 1);
}
