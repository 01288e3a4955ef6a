#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "escvs/controller.hpp"
#include "escvs/plant.hpp"
#include "escvs/plants.hpp"
#include "escvs/simulate.hpp"

namespace escvs {

// Objective target for the custom rigid-body application; the plain
// RigidBodyParams carry no desired attitude.
struct CustomRigidBodyParams {
    RigidBodyParams body;
    std::array<double, 4> q_desired{0.0, 0.0, 0.0, 1.0};
};

using PlantParams =
    std::variant<SatelliteParams, QuadcopterParams, UnicycleParams, CustomRigidBodyParams>;

// A fully declarative run description: plant, controller gains, initial
// conditions, and run settings. No stochastic elements anywhere.
struct Scenario {
    std::string name;
    PlantParams plant;
    EscVsParams controller;
    SimState x0;
    double t_final_s = 0.0;
    std::optional<double> dt_s; // defaulted from omega when absent
    std::size_t decimate = 1;

    std::string application() const;
    double dt() const; // dt_s or the omega-derived default
    void validate() const;
};

// Instantiate the plant described by the scenario.
std::unique_ptr<Plant> make_plant(const Scenario& s);

// Gains as applied to the plant's velocity channels. Scenarios store the
// reference-table values; the quadcopter's are torque-level and get divided
// by the principal inertias here (its dynamics apply inputs through I^-1),
// while the satellite and unicycle gains are already acceleration-level and
// pass through unchanged.
EscVsParams runtime_controller(const Scenario& s);

// Parse a scenario file (key = value lines, '#' comments, comma-separated
// vectors). Throws IoError when unreadable, ValidationError with the field
// name on bad content.
Scenario load_scenario(const std::filesystem::path& path);

// Parse from an in-memory string; origin names the source in diagnostics.
Scenario parse_scenario(const std::string& text, const std::string& origin);

// Serialize; load_scenario(write) round-trips to an identical Scenario.
std::string write_scenario(const Scenario& s);

// Bundled presets reproducing the three reference parameter tables.
std::vector<std::string> preset_names();
const std::string& preset_text(const std::string& name);
Scenario load_preset(const std::string& name);

// Resolve a CLI argument: preset name first, then filesystem path.
Scenario resolve_scenario(const std::string& name_or_path);

} // namespace escvs
