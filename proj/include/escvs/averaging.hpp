#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "escvs/controller.hpp"
#include "escvs/plant.hpp"
#include "escvs/simulate.hpp"
#include "escvs/vec.hpp"

namespace escvs {

// The VOC-averaged companion of the full loop. Autonomous: omega does not
// appear. Gains are taken from the same EscVsParams as the full system.
struct AveragedSystem {
    const Plant* plant = nullptr;
    Vec a;
    Vec c;
    double k = 0.0;
    std::optional<double> hpf_gain;
    double fd_step = 1e-5; // relative finite-difference step

    void validate() const;
};

AveragedSystem make_averaged(const Plant& plant, const EscVsParams& params);

// M22(i,k) = sum_j d2 f_i / (dqdot_k dqdot_j) a_j by central differences,
// evaluated at extended precision. Exact up to rounding for velocity-quadratic
// drifts.
Mat m22(const Plant& plant, const Vec& kin, const Vec& qdot, const Vec& a,
        double fd_step = 1e-5);

// Central-difference gradient of J with respect to the kinematic coordinates
// the objective reads (length = objective_coords().size()).
Vec grad_objective(const Plant& plant, const Vec& kin);

// Gradient of J sensed through the kinematic map: component i is the
// derivative of J along a unit displacement of generalized velocity i held
// for unit time (first-order pushforward). Length n.
Vec pushforward_grad(const Plant& plant, const Vec& kin);

// Right-hand side of the averaged system. State layout matches the full
// loop: [qdot_bar(n), kin(m), u_bar, (h_bar)]. The t argument is unused
// (autonomous) and kept for integrator compatibility.
Vec averaged_rhs(const AveragedSystem& sys, const Vec& state, double t);

Trajectory simulate_averaged(const AveragedSystem& sys, const SimState& x0,
                             double t_final, double dt, std::size_t decimate = 1);

struct ClosenessReport {
    std::vector<double> omegas;
    std::vector<double> sup_errors;
    std::vector<double> decay_ratios; // sup[i+1] / sup[i]
};

// For each omega, integrate the full loop and the shared averaged system
// from the same initial state over [0, t_final] and record the sup-norm
// deviation across the common channels (velocities, kinematics, u_hat).
// The first-order oscillatory component predicted by the variation of
// constants transform is subtracted before comparison (see README).
// Requires >= 3 strictly increasing frequencies.
ClosenessReport closeness_sweep(const Plant& plant, const EscVsParams& params,
                                const SimState& x0, double t_final,
                                const std::vector<double>& omegas);

struct LyapunovReport {
    bool monotone = false;
    double max_increase = 0.0; // largest single-step rise of V after the window
    double window_s = 0.0;     // transient window excluded from the check
    double worst_t = 0.0;      // time of the largest rise
};

// Evaluate V = J - J* along the averaged trajectory and test monotone
// descent after one averaged time constant (1 / min nonzero |c_i|, capped at
// 5% of t_final). J* is 0 for every bundled scenario.
LyapunovReport lyapunov_check(const AveragedSystem& sys, const SimState& x0, double t_final);

} // namespace escvs
