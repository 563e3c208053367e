#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "amsa/cli.hpp"
#include "amsa/problem.hpp"

namespace amsa::cli {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc{} || end != t.data() + t.size()) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + text + "'");
    }
    return value;
}

template <class Int>
Int to_integer(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    Int value{};
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc{} || end != t.data() + t.size()) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + text + "'");
    }
    return value;
}

bool to_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError("config key '" + key + "': expected true or false, got '" + text + "'");
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k) out += ',';
        out += format_double(values[k]);
    }
    return out;
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(to_double("rhos", item));
    }
    return out;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "problem",    "nx",          "ny",          "nt",        "T",
        "alpha",      "rho",         "epsilon",     "max_iters", "basic",
        "minimizer",  "lr",          "lr_decay",    "lr_decay_every", "max_inner_iters",
        "grad_tol",   "cg_tol",      "u0",          "v0",        "output_dir",
        "seed",       "snapshot_every", "directions", "samples", "levels",
        "rhos"};
    return keys;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    if (key == "problem") cfg.problem = value;
    else if (key == "nx") cfg.nx = to_integer<int>(key, value);
    else if (key == "ny") cfg.ny = to_integer<int>(key, value);
    else if (key == "nt") cfg.nt = to_integer<int>(key, value);
    else if (key == "T") cfg.horizon = to_double(key, value);
    else if (key == "alpha") cfg.alpha = to_double(key, value);
    else if (key == "rho") cfg.rho = to_double(key, value);
    else if (key == "epsilon") cfg.epsilon = to_double(key, value);
    else if (key == "max_iters") cfg.max_iters = to_integer<int>(key, value);
    else if (key == "basic") cfg.basic = to_bool(key, value);
    else if (key == "minimizer") cfg.minimizer_mode = value;
    else if (key == "lr") cfg.minimizer.initial_lr = to_double(key, value);
    else if (key == "lr_decay") cfg.minimizer.decay = to_double(key, value);
    else if (key == "lr_decay_every") cfg.minimizer.decay_every = to_integer<int>(key, value);
    else if (key == "max_inner_iters") cfg.minimizer.max_inner_iters = to_integer<int>(key, value);
    else if (key == "grad_tol") cfg.minimizer.grad_tol = to_double(key, value);
    else if (key == "cg_tol") cfg.cg_tol = to_double(key, value);
    else if (key == "u0") cfg.u0 = to_double(key, value);
    else if (key == "v0") cfg.v0 = to_double(key, value);
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "seed") cfg.seed = to_integer<std::uint64_t>(key, value);
    else if (key == "snapshot_every") cfg.snapshot_every = to_integer<int>(key, value);
    else if (key == "directions") cfg.directions = to_integer<int>(key, value);
    else if (key == "samples") cfg.samples = to_integer<int>(key, value);
    else if (key == "levels") cfg.levels = to_integer<int>(key, value);
    else if (key == "rhos") cfg.rhos = parse_list(value);
    else throw ConfigError("unknown config key '" + key + "'");
}

std::string get_setting(const RunConfig& cfg, const std::string& key) {
    if (key == "problem") return cfg.problem;
    if (key == "nx") return std::to_string(cfg.nx);
    if (key == "ny") return std::to_string(cfg.ny);
    if (key == "nt") return std::to_string(cfg.nt);
    if (key == "T") return format_double(cfg.horizon);
    if (key == "alpha") return format_double(cfg.alpha);
    if (key == "rho") return format_double(cfg.rho);
    if (key == "epsilon") return format_double(cfg.epsilon);
    if (key == "max_iters") return std::to_string(cfg.max_iters);
    if (key == "basic") return cfg.basic ? "true" : "false";
    if (key == "minimizer") return cfg.minimizer_mode;
    if (key == "lr") return format_double(cfg.minimizer.initial_lr);
    if (key == "lr_decay") return format_double(cfg.minimizer.decay);
    if (key == "lr_decay_every") return std::to_string(cfg.minimizer.decay_every);
    if (key == "max_inner_iters") return std::to_string(cfg.minimizer.max_inner_iters);
    if (key == "grad_tol") return format_double(cfg.minimizer.grad_tol);
    if (key == "cg_tol") return format_double(cfg.cg_tol);
    if (key == "u0") return format_double(cfg.u0);
    if (key == "v0") return format_double(cfg.v0);
    if (key == "output_dir") return cfg.output_dir;
    if (key == "seed") return std::to_string(cfg.seed);
    if (key == "snapshot_every") return std::to_string(cfg.snapshot_every);
    if (key == "directions") return std::to_string(cfg.directions);
    if (key == "samples") return std::to_string(cfg.samples);
    if (key == "levels") return std::to_string(cfg.levels);
    if (key == "rhos") return join(cfg.rhos);
    throw ConfigError("unknown config key '" + key + "'");
}

void apply_config_text(RunConfig& cfg, const std::string& text) {
    std::stringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(number) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        try {
            apply_setting(cfg, key, line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("config line " + std::to_string(number) + ": " + e.what());
        }
    }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    apply_config_text(cfg, buffer.str());
}

void apply_environment(RunConfig& cfg, const std::function<const char*(const char*)>& lookup) {
    for (const std::string& key : config_keys()) {
        std::string name = env_prefix;
        for (char c : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        const char* value = lookup ? lookup(name.c_str()) : std::getenv(name.c_str());
        if (value) apply_setting(cfg, key, value);
    }
}

void validate(const RunConfig& cfg) {
    const auto names = builtin_problem_names();
    if (std::find(names.begin(), names.end(), cfg.problem) == names.end()) {
        throw ConfigError("unknown problem '" + cfg.problem + "'");
    }
    if (cfg.nx < 4 || cfg.ny < 4 || cfg.nt < 4) throw ConfigError("nx, ny and nt must be >= 4");
    if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) throw ConfigError("T must be positive");
    if (!(cfg.alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (!(cfg.rho >= 0.0) || !std::isfinite(cfg.rho)) throw ConfigError("rho must be >= 0");
    if (!(cfg.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (cfg.max_iters < 1) throw ConfigError("max_iters must be >= 1");
    if (cfg.minimizer_mode != "auto" && cfg.minimizer_mode != "gradient") {
        throw ConfigError("minimizer must be 'auto' or 'gradient'");
    }
    try {
        cfg.minimizer.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!(cfg.cg_tol > 0.0 && cfg.cg_tol < 1.0)) throw ConfigError("cg_tol must lie in (0, 1)");
    if (!std::isfinite(cfg.u0) || !std::isfinite(cfg.v0)) throw ConfigError("u0 and v0 must be finite");
    if (cfg.output_dir.empty()) throw ConfigError("output_dir must not be empty");
    if (cfg.snapshot_every < 0) throw ConfigError("snapshot_every must be >= 0");
    if (cfg.directions < 1) throw ConfigError("directions must be >= 1");
    if (cfg.samples < 1) throw ConfigError("samples must be >= 1");
    if (cfg.levels < 2) throw ConfigError("levels must be >= 2");
    for (double r : cfg.rhos) {
        if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("every rho in rhos must be >= 0");
    }
}

std::string manifest(const RunConfig& cfg) {
    std::string out = "# resolved parameters; pass back with --config to reproduce\n";
    for (const std::string& key : config_keys()) {
        out += key + " = " + get_setting(cfg, key) + "\n";
    }
    return out;
}

}  // namespace amsa::cli
