#include "ivbc/scenario/scenario.hpp"

#include "ivbc/sim/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace ivbc::scenario {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(trim(s.substr(start)));
            return out;
        }
        out.push_back(trim(s.substr(start, pos - start)));
        start = pos + 1;
    }
}

double parse_number(const std::string& s, const char* what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ScenarioInvalid(std::string("bad number in ") + what + ": '" + s + "'");
    }
}

std::uint64_t parse_tick(const std::string& s, const char* what) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ScenarioInvalid(std::string("bad tick in ") + what + ": '" + s + "'");
    return v;
}

sim::RoutePoint parse_point(const std::string& s, const char* what) {
    auto parts = split(s, ',');
    if (parts.size() != 2) throw ScenarioInvalid(std::string("expected x,y in ") + what);
    return {parse_number(parts[0], what), parse_number(parts[1], what)};
}

sim::VehicleSpec parse_vehicle(const std::string& label, const std::string& value) {
    sim::VehicleSpec spec;
    spec.label = label;
    std::string route = value;
    std::size_t at = value.rfind('@');
    if (at != std::string::npos) {
        spec.speed_mps = parse_number(trim(value.substr(at + 1)), "vehicle speed");
        route = trim(value.substr(0, at));
    }
    std::size_t start = 0;
    while (start < route.size()) {
        std::size_t arrow = route.find("->", start);
        std::string point = (arrow == std::string::npos) ? route.substr(start)
                                                         : route.substr(start, arrow - start);
        spec.waypoints.push_back(parse_point(trim(point), "vehicle route"));
        if (arrow == std::string::npos) break;
        start = arrow + 2;
    }
    if (spec.waypoints.empty()) throw ScenarioInvalid("vehicle '" + label + "' has no route");
    return spec;
}

} // namespace

Scenario parse_scenario(const std::string& text) {
    Scenario sc;
    std::istringstream stream(text);
    std::string line;
    std::string section;
    std::size_t lineno = 0;

    while (std::getline(stream, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = t.substr(1, t.size() - 2);
            continue;
        }

        auto where = [&] { return "line " + std::to_string(lineno); };
        if (section.empty()) {
            std::size_t eq = t.find('=');
            if (eq == std::string::npos) throw ScenarioInvalid(where() + ": expected key = value");
            std::string key = trim(t.substr(0, eq));
            std::string value = trim(t.substr(eq + 1));
            if (key == "name") sc.name = value;
            else throw ScenarioInvalid(where() + ": unknown top-level key '" + key + "'");
        } else if (section == "config") {
            std::size_t eq = t.find('=');
            if (eq == std::string::npos) throw ScenarioInvalid(where() + ": expected key = value");
            sc.config_overrides[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
        } else if (section == "vehicles") {
            std::size_t eq = t.find('=');
            if (eq == std::string::npos)
                throw ScenarioInvalid(where() + ": expected label = route");
            sc.vehicles.push_back(parse_vehicle(trim(t.substr(0, eq)), trim(t.substr(eq + 1))));
        } else if (section == "rsu") {
            std::size_t eq = t.find('=');
            if (eq == std::string::npos || trim(t.substr(0, eq)) != "position")
                throw ScenarioInvalid(where() + ": rsu section takes 'position = x,y'");
            sc.with_rsu = true;
            sc.rsu_position = parse_point(trim(t.substr(eq + 1)), "rsu position");
        } else if (section == "messages") {
            auto parts = split(t, ',');
            if (parts.size() != 3)
                throw ScenarioInvalid(where() + ": expected 'tick, sender, kind'");
            Scenario::Emission e;
            e.tick = parse_tick(parts[0], "message tick");
            e.sender = parts[1];
            auto kind = sim::safety_kind_from_name(parts[2]);
            if (!kind) throw ScenarioInvalid(where() + ": unknown message kind '" + parts[2] + "'");
            e.kind = *kind;
            sc.emissions.push_back(std::move(e));
        } else if (section == "adversaries") {
            sim::AdversarySpec spec;
            std::string body = t;
            std::size_t at = t.rfind('@');
            if (at != std::string::npos) {
                spec.position = parse_point(trim(t.substr(at + 1)), "adversary position");
                body = trim(t.substr(0, at));
            }
            auto behavior = sim::adversary_behavior_from_name(body);
            if (!behavior || *behavior == sim::AdversaryBehavior::None)
                throw ScenarioInvalid(where() + ": unknown adversary '" + body + "'");
            spec.behavior = *behavior;
            sc.adversaries.push_back(spec);
        } else if (section == "partitions") {
            auto parts = split(t, ',');
            if (parts.size() != 3)
                throw ScenarioInvalid(where() + ": expected 'from, until, a|b|...'");
            Scenario::Partition p;
            p.from_tick = parse_tick(parts[0], "partition start");
            p.until_tick = parse_tick(parts[1], "partition end");
            p.group_a = split(parts[2], '|');
            sc.partitions.push_back(std::move(p));
        } else {
            throw ScenarioInvalid(where() + ": unknown section [" + section + "]");
        }
    }
    if (sc.name.empty()) throw ScenarioInvalid("scenario has no name");
    return sc;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioInvalid("cannot open scenario file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::optional<std::uint32_t> Scenario::vehicle_index(std::string_view label) const {
    for (std::size_t i = 0; i < vehicles.size(); ++i)
        if (vehicles[i].label == label) return static_cast<std::uint32_t>(i);
    return std::nullopt;
}

void Scenario::validate(const sim::SimConfig& config) const {
    if (vehicles.empty()) throw ScenarioInvalid("scenario needs at least one vehicle");
    for (std::size_t i = 0; i < vehicles.size(); ++i)
        for (std::size_t j = i + 1; j < vehicles.size(); ++j)
            if (vehicles[i].label == vehicles[j].label)
                throw ScenarioInvalid("duplicate vehicle label '" + vehicles[i].label + "'");
    for (const Emission& e : emissions) {
        if (!vehicle_index(e.sender))
            throw ScenarioInvalid("message sender '" + e.sender + "' is not in the roster");
        if (e.tick >= config.duration_ticks)
            throw ScenarioInvalid("message at tick " + std::to_string(e.tick) +
                                  " is past the run duration");
    }
    for (const Partition& p : partitions) {
        if (p.from_tick >= p.until_tick)
            throw ScenarioInvalid("partition window is empty");
        for (const std::string& label : p.group_a)
            if (!vehicle_index(label))
                throw ScenarioInvalid("partition names unknown vehicle '" + label + "'");
    }
}

sim::WorldSetup Scenario::to_setup() const {
    sim::WorldSetup setup;
    setup.vehicles = vehicles;
    setup.with_rsu = with_rsu;
    setup.rsu_position = rsu_position;
    setup.adversaries = adversaries;
    for (const Emission& e : emissions)
        setup.messages.push_back({e.tick, *vehicle_index(e.sender), e.kind});
    for (const Partition& p : partitions) {
        sim::PartitionPlan plan;
        plan.from_tick = p.from_tick;
        plan.until_tick = p.until_tick;
        for (const std::string& label : p.group_a) plan.group_a.push_back(*vehicle_index(label));
        setup.partitions.push_back(std::move(plan));
    }
    return setup;
}

namespace {

// The intersection use case: four vehicles converging on a crossing with
// a roadside unit at the center, one hazard plus routine crossing traffic.
constexpr const char* kIntersection = R"(name = intersection
[config]
duration_ticks = 12000
[vehicles]
north = 0,-220 -> 0,220 @ 14
south = 0,220 -> 0,-220 @ 14
east  = 220,0 -> -220,0 @ 13
west  = -220,0 -> 220,0 @ 15
[rsu]
position = 0,0
[messages]
1000, north, HazardAhead
1400, east,  IntersectionCrossing
1900, south, CongestionReport
2500, west,  IntersectionCrossing
3100, north, IntersectionCrossing
3700, east,  CongestionReport
4400, south, HazardAhead
5000, west,  CongestionReport
5600, north, CongestionReport
6300, east,  HazardAhead
)";

// A ten-vehicle platoon on a straight road with lossy radio; doubles as
// the desk-scale convergence fixture.
constexpr const char* kConvoy = R"(name = convoy
[config]
duration_ticks = 16000
drop_probability = 0.2
base_difficulty = 8
[vehicles]
car0 = 0,0 -> 3000,0 @ 20
car1 = -40,0 -> 2960,0 @ 20
car2 = -80,0 -> 2920,0 @ 20
car3 = -120,0 -> 2880,0 @ 20
car4 = -160,0 -> 2840,0 @ 20
car5 = -200,0 -> 2800,0 @ 20
car6 = -240,0 -> 2760,0 @ 20
car7 = -280,0 -> 2720,0 @ 20
car8 = -320,0 -> 2680,0 @ 20
car9 = -360,0 -> 2640,0 @ 20
[messages]
600,  car0, CongestionReport
1200, car3, HazardAhead
1800, car6, CongestionReport
2400, car9, CongestionReport
3000, car1, HazardAhead
3600, car4, CongestionReport
4200, car7, CongestionReport
4800, car2, HazardAhead
5400, car5, CongestionReport
6000, car8, CongestionReport
6600, car0, CongestionReport
7200, car5, HazardAhead
)";

// Two clusters that lose each other for a while; exercises fork choice
// and the rolled-back ledger after healing.
constexpr const char* kPartitionHeal = R"(name = partition-heal
[config]
duration_ticks = 15000
[vehicles]
a0 = -60,40  -> 540,40  @ 10
a1 = -60,0   -> 540,0   @ 10
a2 = -60,-40 -> 540,-40 @ 10
b0 = 60,40   -> 660,40  @ 10
b1 = 60,0    -> 660,0   @ 10
b2 = 60,-40  -> 660,-40 @ 10
[messages]
500,  a0, CongestionReport
1100, b0, CongestionReport
2300, a1, HazardAhead
2900, b1, HazardAhead
3500, a2, CongestionReport
4100, b2, CongestionReport
4700, a0, IntersectionCrossing
5300, b0, IntersectionCrossing
6500, a1, CongestionReport
7100, b1, CongestionReport
8000, a2, HazardAhead
[partitions]
2000, 6000, a0|a1|a2
)";

// Honest traffic with one replayer, one forged identity and one
// block-tampering relay in the mix.
constexpr const char* kAdversaryMix = R"(name = adversary-mix
[config]
duration_ticks = 13000
[vehicles]
v0 = -150,0 -> 450,0 @ 12
v1 = -150,30 -> 450,30 @ 12
v2 = -150,-30 -> 450,-30 @ 12
v3 = -150,60 -> 450,60 @ 12
v4 = -150,-60 -> 450,-60 @ 12
[rsu]
position = 150,0
[messages]
800,  v0, HazardAhead
1500, v1, CongestionReport
2200, v2, IntersectionCrossing
2900, v3, CongestionReport
3600, v4, HazardAhead
4300, v0, CongestionReport
5000, v1, HazardAhead
5700, v2, CongestionReport
6400, v3, IntersectionCrossing
7100, v4, CongestionReport
[adversaries]
replay_attacker @ 0,100
forged_ivtp @ 0,-100
tampered_block_relay @ 100,100
)";

const std::vector<std::pair<std::string, const char*>>& builtin_table() {
    static const std::vector<std::pair<std::string, const char*>> table = {
        {"intersection", kIntersection},
        {"convoy", kConvoy},
        {"partition-heal", kPartitionHeal},
        {"adversary-mix", kAdversaryMix},
    };
    return table;
}

} // namespace

const std::vector<std::string>& builtin_scenario_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, _] : builtin_table()) out.push_back(name);
        return out;
    }();
    return names;
}

std::optional<Scenario> builtin_scenario(const std::string& name) {
    for (const auto& [n, text] : builtin_table())
        if (n == name) return parse_scenario(text);
    return std::nullopt;
}

Scenario resolve_scenario(const std::string& name_or_path) {
    if (auto builtin = builtin_scenario(name_or_path)) return *builtin;
    if (std::filesystem::exists(name_or_path)) return load_scenario_file(name_or_path);
    throw ScenarioInvalid("no builtin scenario or file named '" + name_or_path + "'");
}

} // namespace ivbc::scenario
