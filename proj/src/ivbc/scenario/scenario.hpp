#pragma once

#include "ivbc/sim/world.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ivbc::scenario {

struct ScenarioInvalid : std::runtime_error {
    explicit ScenarioInvalid(const std::string& what) : std::runtime_error(what) {}
};

/// A declarative run script: the vehicle roster with routes, scripted
/// message emissions, adversaries, optional partitions and configuration
/// overrides. Vehicles are referenced by label.
struct Scenario {
    struct Emission {
        std::uint64_t tick = 0;
        std::string sender;
        sim::SafetyKind kind = sim::SafetyKind::HazardAhead;
    };
    struct Partition {
        std::uint64_t from_tick = 0;
        std::uint64_t until_tick = 0;
        std::vector<std::string> group_a;
    };

    std::string name;
    std::vector<sim::VehicleSpec> vehicles;
    bool with_rsu = false;
    sim::RoutePoint rsu_position{0.0, 0.0};
    std::vector<sim::AdversarySpec> adversaries;
    std::vector<Emission> emissions;
    std::vector<Partition> partitions;
    std::map<std::string, std::string> config_overrides;

    /// Throws ScenarioInvalid when labels or ticks do not line up.
    void validate(const sim::SimConfig& config) const;

    /// Resolves labels to node indices.
    sim::WorldSetup to_setup() const;

    std::optional<std::uint32_t> vehicle_index(std::string_view label) const;
};

/// Parses the scenario text format:
///   name = intersection
///   [config]    key = value overrides
///   [vehicles]  label = x,y -> x,y @ speed_mps
///   [rsu]       position = x,y
///   [messages]  tick, sender_label, kind
///   [adversaries] behavior @ x,y
///   [partitions]  from_tick, until_tick, label|label|...
Scenario parse_scenario(const std::string& text);
Scenario load_scenario_file(const std::filesystem::path& path);

const std::vector<std::string>& builtin_scenario_names();
std::optional<Scenario> builtin_scenario(const std::string& name);

/// Builtin by name, or parsed from a file path.
Scenario resolve_scenario(const std::string& name_or_path);

} // namespace ivbc::scenario
