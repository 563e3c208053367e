#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "amsa/hamiltonian.hpp"

namespace amsa::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 1;
inline constexpr int exit_max_iters = 2;
inline constexpr int exit_blow_up = 3;
inline constexpr int exit_check_failed = 4;  ///< a diagnostics suite ran but an invariant failed

/// Prefix for environment overrides: AMSA_NX=20 sets `nx`.
inline constexpr const char* env_prefix = "AMSA_";

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string problem = "reference";
    int nx = 100;
    int ny = 100;
    int nt = 25;
    double horizon = 1.0;
    double alpha = 1.0;

    double rho = 1.0;
    double epsilon = 1e-4;
    int max_iters = 10000;
    bool basic = false;
    std::string minimizer_mode = "auto";  ///< auto | gradient
    MinimizerConfig minimizer;
    double cg_tol = 1e-10;

    double u0 = 0.01;
    double v0 = 0.0;

    std::string output_dir = "amsa_out";
    std::uint64_t seed = 42;
    int snapshot_every = 0;

    int directions = 5;    ///< gradient suite
    int samples = 50;      ///< stability and costgap suites
    int levels = 3;        ///< convergence suite
    std::vector<double> rhos;  ///< sweep
};

/// Every recognised key, in manifest order.
const std::vector<std::string>& config_keys();

/// Sets one key from its textual value. Throws ConfigError on an unknown key or a
/// value that does not parse.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Flat `key = value` lines; `#` starts a comment; blank lines are ignored.
void apply_config_text(RunConfig& cfg, const std::string& text);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// Applies AMSA_<KEY> variables found through `lookup` (std::getenv by default).
void apply_environment(RunConfig& cfg,
                       const std::function<const char*(const char*)>& lookup = nullptr);

/// Range checks; throws ConfigError.
void validate(const RunConfig& cfg);

std::string get_setting(const RunConfig& cfg, const std::string& key);

/// Re-loadable config text listing every resolved key.
std::string manifest(const RunConfig& cfg);

// CSV -----------------------------------------------------------------------

/// Shortest decimal string that reads back to the same double.
std::string format_double(double value);

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    void row(const std::vector<std::string>& cells);
    void flush() { out_.flush(); }

private:
    std::ofstream out_;
    std::size_t columns_;
};

// Commands ------------------------------------------------------------------

int cmd_run(const RunConfig& cfg, std::ostream& log);
int cmd_diagnose(const std::string& suite, const RunConfig& cfg, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, std::ostream& log);

std::vector<double> parse_list(const std::string& text);

/// Full command-line entry point: `run`, `diagnose <suite>`, `sweep`.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace amsa::cli
