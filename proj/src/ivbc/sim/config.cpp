#include "ivbc/sim/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace ivbc::sim {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ConfigError("bad unsigned value for '" + key + "': " + value);
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        double out = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for '" + key + "': " + value);
    }
}

} // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream stream(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(stream, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') continue; // section headers are cosmetic
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        out[key] = value;
    }
    return out;
}

void SimConfig::apply(const std::map<std::string, std::string>& entries) {
    for (const auto& [key, value] : entries) {
        if (key == "node_count") node_count = static_cast<std::uint32_t>(parse_u64(key, value));
        else if (key == "seed") seed = parse_u64(key, value);
        else if (key == "latency_min_ticks") latency_min_ticks = parse_u64(key, value);
        else if (key == "latency_max_ticks") latency_max_ticks = parse_u64(key, value);
        else if (key == "drop_probability") drop_probability = parse_double(key, value);
        else if (key == "radio_range_m") radio_range_m = parse_double(key, value);
        else if (key == "base_difficulty") base_difficulty = static_cast<std::uint32_t>(parse_u64(key, value));
        else if (key == "unit_m") unit_m = parse_u64(key, value);
        else if (key == "reward_amount") reward_amount = parse_u64(key, value);
        else if (key == "initial_balance") initial_balance = parse_u64(key, value);
        else if (key == "duration_ticks") duration_ticks = parse_u64(key, value);
        else throw ConfigError("unknown configuration key '" + key + "'");
    }
}

void SimConfig::validate() const {
    if (duration_ticks == 0) throw ConfigError("duration_ticks must be > 0");
    if (drop_probability < 0.0 || drop_probability > 1.0)
        throw ConfigError("drop_probability must be within [0,1]");
    if (latency_min_ticks > latency_max_ticks)
        throw ConfigError("latency_min_ticks must be <= latency_max_ticks");
    if (base_difficulty < 1) throw ConfigError("base_difficulty must be >= 1");
    if (unit_m < 1) throw ConfigError("unit_m must be >= 1");
    if (radio_range_m < 0.0) throw ConfigError("radio_range_m must be >= 0");
    if (reward_amount < 1) throw ConfigError("reward_amount must be >= 1");
}

SimConfig config_from_text(const std::string& text) {
    SimConfig cfg;
    cfg.apply(parse_key_values(text));
    cfg.validate();
    return cfg;
}

SimConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_text(buf.str());
}

} // namespace ivbc::sim
