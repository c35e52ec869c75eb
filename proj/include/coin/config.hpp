#pragma once

// key = value run configuration with dotted keys, optional [section] headers and
// command-line overrides.

#include "coin/bootstrap.hpp"
#include "coin/evaluation.hpp"
#include "coin/simulate.hpp"
#include "coin/target.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace coin {

class Config {
public:
    static Config parse(std::istream& in, const std::string& source = "config");
    static Config load(const std::filesystem::path& path);

    // "key=value"
    void apply_override(const std::string& assignment);
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const { return values_.contains(key); }
    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    int get_int(const std::string& key, int fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    double get_angle(const std::string& key, double fallback) const;
    // "auto" or missing gives nullopt.
    std::optional<int> get_rank(const std::string& key) const;

    // Sorted "key=value" lines; the basis of the config hash.
    std::string canonical() const;
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

// Accepts plain numbers and multiples of pi such as "pi", "pi/6", "2*pi/3", "0.5pi".
double parse_angle(const std::string& text);

struct SimulationConfig {
    DgpSpec dgp;
    Eigen::VectorXd gdp_loading;
    double gdp_mu = 0.002;
    double gdp_noise_sd = 0.003;
    std::uint64_t gdp_seed = 7;
};

struct RunConfig {
    enum class Mode { Real, Simulate } mode = Mode::Real;
    std::filesystem::path panel_path;
    std::filesystem::path gdp_path;
    std::filesystem::path output_dir = "out";
    IngestConfig ingest;
    ModelOptions model;
    RollingPlan plan;
    RollingOptions rolling;
    WishartConfig bootstrap;
    bool save_draws = false;
    std::vector<Method> methods{Method::USCOIN, Method::BP, Method::CF, Method::SW};
    bool evaluate_pit = false;
    TargetOptions target;
    SimulationConfig simulation;
};

// Validates keys and ranges; in real mode the input files must exist.
RunConfig build_run_config(const Config& config);

}  // namespace coin
