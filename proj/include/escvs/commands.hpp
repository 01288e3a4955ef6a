#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "escvs/averaging.hpp"
#include "escvs/scenario.hpp"

namespace escvs {

struct RunReport {
    double final_window_j_mean = 0.0; // mean of J over the last 10% of the run
    double max_abs_u_hat = 0.0;
    double wall_seconds = 0.0;
    std::size_t step_count = 0;
    std::vector<std::string> warnings;
};

// Horizon used by compare-averaged: long enough to cover the washout
// transient where the O(1/omega) deviation peaks, short enough that the
// slowly winding kinematic channels have not decohered (see README).
inline constexpr double kClosenessHorizonS = 2.0;

// Integrate the scenario, write trajectory.csv and summary.txt under out_dir.
RunReport cmd_run(const Scenario& s, const std::filesystem::path& out_dir);

// Run closeness_sweep at the given frequencies (default {w, 2w, 4w}) over
// min(t_final, kClosenessHorizonS); writes paired trajectories and the
// decay-ratio table.
ClosenessReport cmd_compare_averaged(const Scenario& s, const std::filesystem::path& out_dir,
                                     std::vector<double> omegas = {});

struct SweepRow {
    double value = 0.0;
    bool ok = false;
    std::string error;
    RunReport report;
};

// Re-run the scenario once per value of the swept parameter
// (omega | k | a_scale | c_scale). Row failures are recorded, not fatal.
std::vector<SweepRow> cmd_sweep(const Scenario& s, const std::string& param,
                                const std::vector<double>& values,
                                const std::filesystem::path& out_dir);

// Shared output helpers (also used by the tests).
void write_trajectory_csv(const std::filesystem::path& file, const Plant& plant,
                          const Trajectory& traj);
RunReport make_report(const Scenario& s, const Trajectory& traj, double wall_seconds,
                      std::size_t step_count);

} // namespace escvs
