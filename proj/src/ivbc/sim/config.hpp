#pragma once

#include "ivbc/params.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

namespace ivbc::sim {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Per-run simulation parameters. Configuration files use exactly these
/// key names, one `key = value` per line.
struct SimConfig {
    std::uint32_t node_count = 4;      // roster size for generated worlds
    std::uint64_t seed = 1;            // master seed of the single run RNG
    std::uint64_t latency_min_ticks = 1;
    std::uint64_t latency_max_ticks = 5;
    double drop_probability = 0.0;     // per delivery, in [0,1]
    double radio_range_m = 300.0;
    std::uint32_t base_difficulty = 8;
    std::uint64_t unit_m = 1000;
    std::uint64_t reward_amount = 1;
    std::uint64_t initial_balance = 100;
    std::uint64_t duration_ticks = 10000;

    ChainParams chain_params() const {
        return {base_difficulty, unit_m, reward_amount, initial_balance};
    }

    /// Throws ConfigError when a bound is violated.
    void validate() const;

    /// Applies `key = value` pairs; unknown keys are errors.
    void apply(const std::map<std::string, std::string>& entries);
};

// Fixed cadence of the node state machines (ticks are simulated ms).
inline constexpr std::uint64_t kBeaconIntervalTicks = 50;
inline constexpr std::uint64_t kSealIntervalTicks = 50;
inline constexpr std::uint64_t kAckWindowTicks = 100;
inline constexpr std::uint64_t kFreshnessWindowTicks = 500;
inline constexpr std::uint64_t kSyncIntervalTicks = 25;
inline constexpr std::uint64_t kAdversaryIntervalTicks = 75;
/// Nonces a sealer may try per attempt; bounds the per-round hash budget
/// so lower effective difficulty means better sealing odds.
inline constexpr std::uint64_t kSealHashBudget = 64;
inline constexpr std::size_t kGetBlocksBatch = 8;

/// Parses a flat key/value document ("key = value", '#' comments,
/// optional [section] headers which are flattened away).
std::map<std::string, std::string> parse_key_values(const std::string& text);

SimConfig load_config_file(const std::filesystem::path& path);
SimConfig config_from_text(const std::string& text);

} // namespace ivbc::sim
