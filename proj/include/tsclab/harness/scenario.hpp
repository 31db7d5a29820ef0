#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tsclab/devices/ibr.hpp"
#include "tsclab/harness/simulator.hpp"
#include "tsclab/network/events.hpp"
#include "tsclab/network/network.hpp"
#include "tsclab/ph/ph.hpp"
#include "tsclab/system/power_system.hpp"

namespace tsclab::harness {

/// Schema or semantic error in a scenario file. `where` is "line N" for JSON
/// syntax errors or a field path such as "devices[1].params.c_dc".
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(const std::string& where, const std::string& what)
        : std::runtime_error(where.empty() ? what : where + ": " + what), where_(where) {}
    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

struct DevicePlacement {
    std::string name;
    std::string bus;
    std::string model;  // gfl, gfm, vsm, sm2, infinite
    int study_case = 0; // converter wiring preset; 0 derives it from the model
    std::optional<double> slack_sign;
    std::optional<bool> literal_power_reference;
    std::map<std::string, double> params;
    std::optional<numerics::Complex> dispatch;
};

struct ClassificationSettings {
    double window = 2.0;       // trailing window, s
    double settle_tol = 1e-3;  // peak-to-peak per channel, pu
};

struct SweepSettings {
    std::string param;  // Cdc, Tslack, imax, M
    std::vector<double> values;
    std::string device = "*";
};

struct Scenario {
    std::string name;
    std::string description;
    int study_case = 0;
    network::Network network;
    std::vector<DevicePlacement> devices;
    std::vector<network::Event> events;
    SimulationOptions simulation;
    std::vector<std::string> channels;  // empty selects every channel
    ClassificationSettings classification;
    ph::Condition3Options condition3;
    std::optional<SweepSettings> sweep;
};

/// Default converter MVA ratings for the IBRs at buses 1, 2, 3.
inline constexpr double kIbrRatingMva[3] = {53.8, 1150.0, 770.0};

/// Preset for study case 1..6: converters at buses 1-3 of the 9-bus system,
/// 5% load step at bus 5 at t = 1 s (10% for case 6).
Scenario case_scenario(int study_case);

/// Applies "key=value" overrides: "IBR1.c_dc=0.02", "*.t_slack=0.05",
/// "t_end=10", "step=5e-4", "event0.magnitude=0.1".
void apply_override(Scenario& s, const std::string& assignment);

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text);
std::string scenario_to_json(const Scenario& s);

void validate_scenario(const Scenario& s);
system::PowerSystem build_system(const Scenario& s);

/// Maps a sweep parameter alias (Cdc, Tslack, imax, M) to the device parameter name.
std::string sweep_parameter_name(const std::string& alias);

}  // namespace tsclab::harness
