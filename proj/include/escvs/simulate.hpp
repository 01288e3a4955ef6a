#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "escvs/controller.hpp"
#include "escvs/plant.hpp"
#include "escvs/vec.hpp"

namespace escvs {

// State of the closed loop at one instant. h is present exactly when the
// scenario runs the washout-filter adaptation law.
struct SimState {
    Vec qdot;
    Vec kin;
    double u_hat = 0.0;
    std::optional<double> h;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<SimState> states;
    std::vector<Vec> inputs;       // applied generalized forces, length n each
    std::vector<double> objective; // J sampled from the kinematic state
    double dt = 0.0;               // recording interval (integration dt * decimate)

    std::size_t size() const { return times.size(); }
};

// Integrate the full ESC-VS loop with fixed-step RK4. Quaternion kinematic
// states are renormalized after every step. Records every `decimate`-th step
// (step count is rounded up to a whole number of recording intervals so the
// endpoint is always captured).
// Throws ValidationError on inconsistent arguments, IntegrationDivergedError
// or KinematicSingularityError from inside the loop.
Trajectory simulate(const Plant& plant, const EscVsParams& params, const SimState& x0,
                    double t_final, double dt, std::size_t decimate = 1);

// Default integration step: 200 samples per dither period.
double default_dt(double omega);

// Mean of a signal over the last 10% of a trajectory.
double final_window_mean(const std::vector<double>& times, const std::vector<double>& values);

} // namespace escvs
