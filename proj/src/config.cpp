#include "coin/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace coin {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s)
{
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

double to_double(const std::string& text, const std::string& key)
{
    const std::string t = trim(text);
    double v = 0.0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size() || t.empty())
        throw ConfigError("config", "key '" + key + "': '" + text + "' is not a number");
    return v;
}

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

const std::set<std::string>& known_keys()
{
    static const std::set<std::string> keys{
        "mode",
        "paths.panel", "paths.gdp", "paths.output",
        "data.start", "data.end", "data.exclude",
        "spectral.M_T", "spectral.m",
        "factors.q", "factors.r", "factors.r_phi", "factors.k_max", "factors.q_max",
        "cutoff.theta_c",
        "nowcast.band_q", "nowcast.band_a",
        "rolling.window", "rolling.test_start", "rolling.test_end", "rolling.cf_coefficient", "rolling.extension",
        "bootstrap.B", "bootstrap.dof_rule", "bootstrap.dof", "bootstrap.seed", "bootstrap.projection_noise",
        "bootstrap.save_draws",
        "evaluate.methods", "evaluate.pit",
        "target.ordering", "target.half_width", "target.quarterly_half_width", "target.support",
        "simulate.n", "simulate.T", "simulate.q", "simulate.r", "simulate.r_phi", "simulate.ar", "simulate.s",
        "simulate.theta_c", "simulate.rho_xi", "simulate.rho_x", "simulate.idio_variance", "simulate.split",
        "simulate.seed", "simulate.burn_in", "simulate.start", "simulate.gdp_loading", "simulate.gdp_mu",
        "simulate.gdp_noise_sd", "simulate.gdp_seed",
    };
    return keys;
}

}  // namespace

double parse_angle(const std::string& text)
{
    const std::string t = lower(trim(text));
    const auto pos = t.find("pi");
    if (pos == std::string::npos) return to_double(t, "angle");
    std::string coef = trim(t.substr(0, pos));
    if (!coef.empty() && coef.back() == '*') coef = trim(coef.substr(0, coef.size() - 1));
    const double c = coef.empty() ? 1.0 : to_double(coef, "angle");
    std::string rest = trim(t.substr(pos + 2));
    double d = 1.0;
    if (!rest.empty()) {
        if (rest.front() != '/') throw ConfigError("config", "cannot parse angle '" + text + "'");
        d = to_double(rest.substr(1), "angle");
        if (d == 0.0) throw ConfigError("config", "angle '" + text + "' divides by zero");
    }
    return c * kPi / d;
}

Config Config::parse(std::istream& in, const std::string& source)
{
    Config cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("config", source + ":" + std::to_string(lineno) + ": bad section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config", source + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        if (!section.empty()) key = section + "." + key;
        cfg.set(key, trim(line.substr(eq + 1)));
    }
    return cfg;
}

Config Config::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open config file " + path.string());
    return parse(in, path.string());
}

void Config::set(const std::string& key, const std::string& value)
{
    if (!known_keys().contains(key)) throw ConfigError("config", "unknown key '" + key + "'");
    values_[key] = value;
}

void Config::apply_override(const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("config", "override '" + assignment + "' is not key=value");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

std::optional<std::string> Config::get(const std::string& key) const
{
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const
{
    return get(key).value_or(fallback);
}

int Config::get_int(const std::string& key, int fallback) const
{
    auto v = get(key);
    if (!v) return fallback;
    const double d = to_double(*v, key);
    if (d != std::floor(d)) throw ConfigError("config", "key '" + key + "' must be an integer");
    return static_cast<int>(d);
}

double Config::get_double(const std::string& key, double fallback) const
{
    auto v = get(key);
    return v ? to_double(*v, key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const
{
    auto v = get(key);
    if (!v) return fallback;
    const std::string t = lower(*v);
    if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
    if (t == "false" || t == "no" || t == "0" || t == "off") return false;
    throw ConfigError("config", "key '" + key + "' must be true or false");
}

double Config::get_angle(const std::string& key, double fallback) const
{
    auto v = get(key);
    if (!v) return fallback;
    try {
        return parse_angle(*v);
    } catch (const ConfigError&) {
        throw ConfigError("config", "key '" + key + "': cannot parse angle '" + *v + "'");
    }
}

std::optional<int> Config::get_rank(const std::string& key) const
{
    auto v = get(key);
    if (!v || lower(*v) == "auto") return std::nullopt;
    const int r = get_int(key, 0);
    if (r < 1) throw ConfigError("config", "key '" + key + "' must be 'auto' or a positive integer");
    return r;
}

std::string Config::canonical() const
{
    std::string out;
    for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
    return out;
}

namespace {

YearMonth get_month(const Config& c, const std::string& key, YearMonth fallback)
{
    auto v = c.get(key);
    if (!v) return fallback;
    try {
        return YearMonth::parse(*v);
    } catch (const DataError&) {
        throw ConfigError("config", "key '" + key + "': cannot parse month '" + *v + "'");
    }
}

void require(bool ok, const std::string& key, const std::string& what)
{
    if (!ok) throw ConfigError("config", "key '" + key + "': " + what);
}

}  // namespace

RunConfig build_run_config(const Config& c)
{
    RunConfig rc;
    const auto mode = c.get("mode");
    if (!mode) throw ConfigError("config", "key 'mode' is required (real or simulate)");
    if (lower(*mode) == "real") rc.mode = RunConfig::Mode::Real;
    else if (lower(*mode) == "simulate") rc.mode = RunConfig::Mode::Simulate;
    else throw ConfigError("config", "key 'mode': expected real or simulate, got '" + *mode + "'");

    rc.output_dir = c.get_or("paths.output", "out");
    if (rc.mode == RunConfig::Mode::Real) {
        const auto panel = c.get("paths.panel");
        const auto gdp = c.get("paths.gdp");
        require(panel.has_value(), "paths.panel", "required in real mode");
        require(gdp.has_value(), "paths.gdp", "required in real mode");
        rc.panel_path = *panel;
        rc.gdp_path = *gdp;
        require(std::filesystem::exists(rc.panel_path), "paths.panel", "file " + *panel + " does not exist");
        require(std::filesystem::exists(rc.gdp_path), "paths.gdp", "file " + *gdp + " does not exist");
    }

    if (c.has("data.start")) rc.ingest.start = get_month(c, "data.start", {});
    if (c.has("data.end")) rc.ingest.end = get_month(c, "data.end", {});
    if (auto ex = c.get("data.exclude")) rc.ingest.exclude = split_list(*ex);

    ModelOptions& m = rc.model;
    m.M_T = c.get_int("spectral.M_T", 20);
    m.m = c.get_int("spectral.m", 75);
    require(m.M_T >= 1, "spectral.M_T", "must be positive");
    require(m.m >= 1, "spectral.m", "must be positive");
    m.theta_c = c.get_angle("cutoff.theta_c", kPi / 6);
    require(m.theta_c > 0 && m.theta_c <= kPi, "cutoff.theta_c", "must lie in (0, pi]");
    m.band_q = c.get_angle("nowcast.band_q", kPi / 6);
    m.band_a = c.get_angle("nowcast.band_a", kPi / 2);
    require(m.band_q > 0, "nowcast.band_q", "must be positive");
    require(m.band_a > 0, "nowcast.band_a", "must be positive");
    m.ranks.q = c.get_rank("factors.q");
    m.ranks.r = c.get_rank("factors.r");
    m.ranks.r_phi = c.get_rank("factors.r_phi");
    m.ranks.k_max = c.get_int("factors.k_max", 8);
    m.ranks.q_max = c.get_int("factors.q_max", 6);
    require(m.ranks.k_max >= 1, "factors.k_max", "must be positive");
    require(m.ranks.q_max >= 1, "factors.q_max", "must be positive");
    if (m.ranks.r && m.ranks.r_phi)
        require(*m.ranks.r_phi <= *m.ranks.r, "factors.r_phi", "must not exceed factors.r");
    m.ranks.theta_c = m.theta_c;

    rc.plan.window_length = c.get_int("rolling.window", 241);
    require(rc.plan.window_length >= 24, "rolling.window", "must be at least 24 months");
    rc.plan.test_start = get_month(c, "rolling.test_start", {1980, 1});
    rc.plan.test_end = get_month(c, "rolling.test_end", {2018, 12});
    require(rc.plan.test_start <= rc.plan.test_end, "rolling.test_end", "precedes rolling.test_start");
    rc.rolling.model = m;
    if (c.has("rolling.cf_coefficient")) rc.rolling.cf_coefficient = c.get_double("rolling.cf_coefficient", 0.0);
    rc.rolling.extension_quarters = c.get_int("rolling.extension", 12);
    require(rc.rolling.extension_quarters >= 0, "rolling.extension", "must be non-negative");
    rc.rolling.cutoff = m.theta_c;

    rc.bootstrap.B = c.get_int("bootstrap.B", 500);
    require(rc.bootstrap.B >= 1, "bootstrap.B", "must be at least 1");
    const std::string rule = lower(c.get_or("bootstrap.dof_rule", "T/M_T"));
    std::string compact;
    for (char ch : rule)
        if (ch != ' ' && ch != '*' && ch != '(' && ch != ')') compact += ch;
    if (compact == "t/m_t" || compact == "t_over_m") rc.bootstrap.dof_rule = DofRule::TOverM;
    else if (compact == "t/m_tlogm_t" || compact == "t/m_tlog(m_t)" || compact == "t_star" || compact == "t*")
        rc.bootstrap.dof_rule = DofRule::TOverMLogM;
    else throw ConfigError("config", "key 'bootstrap.dof_rule': expected T/M_T or T/(M_T log M_T)");
    if (c.has("bootstrap.dof")) rc.bootstrap.dof_override = c.get_double("bootstrap.dof", 0.0);
    if (auto seed = c.get("bootstrap.seed")) {
        try {
            rc.bootstrap.seed = std::stoull(*seed);
        } catch (const std::exception&) {
            throw ConfigError("config", "key 'bootstrap.seed' must be a non-negative integer");
        }
    }
    rc.bootstrap.projection_noise = c.get_bool("bootstrap.projection_noise", false);
    rc.save_draws = c.get_bool("bootstrap.save_draws", false);

    if (auto methods = c.get("evaluate.methods")) {
        rc.methods.clear();
        for (const auto& name : split_list(*methods)) {
            try {
                rc.methods.push_back(parse_method(name));
            } catch (const ConfigError&) {
                throw ConfigError("config", "key 'evaluate.methods': unknown method '" + name + "'");
            }
        }
        require(!rc.methods.empty(), "evaluate.methods", "at least one method is required");
    }
    rc.evaluate_pit = c.get_bool("evaluate.pit", false);

    const std::string ordering = lower(c.get_or("target.ordering", "interpolate_first"));
    if (ordering == "interpolate_first") rc.target.ordering = TargetOrdering::InterpolateThenFilter;
    else if (ordering == "filter_first") rc.target.ordering = TargetOrdering::FilterThenInterpolate;
    else throw ConfigError("config", "key 'target.ordering': expected interpolate_first or filter_first");
    rc.target.cutoff = m.theta_c;
    rc.target.half_width = c.get_int("target.half_width", 36);
    rc.target.quarterly_half_width = c.get_int("target.quarterly_half_width", 12);
    rc.target.support = c.get_int("target.support", 0);
    require(rc.target.half_width >= 1, "target.half_width", "must be positive");
    rc.rolling.half_width = rc.target.half_width;

    SimulationConfig& s = rc.simulation;
    DgpSpec& d = s.dgp;
    d.n = c.get_int("simulate.n", 50);
    d.T = c.get_int("simulate.T", 600);
    d.q = c.get_int("simulate.q", 2);
    d.r = c.get_int("simulate.r", 2);
    d.r_phi = c.get_int("simulate.r_phi", 1);
    d.ar = c.get_double("simulate.ar", 0.5);
    d.s = c.get_int("simulate.s", 6);
    d.theta_c = c.get_angle("simulate.theta_c", kPi / 6);
    d.rho_xi = c.get_double("simulate.rho_xi", 0.3);
    d.rho_x = c.get_double("simulate.rho_x", 0.3);
    d.idio_variance = c.get_double("simulate.idio_variance", 1.0);
    d.split = c.get_bool("simulate.split", true);
    d.seed = static_cast<std::uint64_t>(c.get_int("simulate.seed", 1));
    d.burn_in = c.get_int("simulate.burn_in", 500);
    d.start = get_month(c, "simulate.start", {1960, 1});
    if (rc.mode == RunConfig::Mode::Simulate) {
        try {
            d.validate();
        } catch (const ConfigError& e) {
            throw ConfigError("config", std::string("simulate.*: ") + e.what());
        }
    }
    const Index n_smooth = d.split ? d.r_phi : d.r;
    if (auto loading = c.get("simulate.gdp_loading")) {
        const auto items = split_list(*loading);
        require(static_cast<Index>(items.size()) == n_smooth, "simulate.gdp_loading",
                "needs one entry per smooth factor (" + std::to_string(n_smooth) + ")");
        s.gdp_loading.resize(n_smooth);
        for (Index i = 0; i < n_smooth; ++i) s.gdp_loading(i) = to_double(items[static_cast<std::size_t>(i)], "simulate.gdp_loading");
    } else {
        s.gdp_loading = Eigen::VectorXd::Constant(n_smooth, 0.003);
    }
    s.gdp_mu = c.get_double("simulate.gdp_mu", 0.002);
    s.gdp_noise_sd = c.get_double("simulate.gdp_noise_sd", 0.003);
    require(s.gdp_noise_sd >= 0, "simulate.gdp_noise_sd", "must be non-negative");
    s.gdp_seed = static_cast<std::uint64_t>(c.get_int("simulate.gdp_seed", 7));
    return rc;
}

}  // namespace coin
