#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "escvs/errors.hpp"
#include "escvs/plant.hpp"
#include "escvs/vec.hpp"

namespace escvs {

// All inertia-like matrices are constant and diagonal, stored as 3-vectors.

struct RigidBodyParams {
    std::array<double, 3> inertia{1.0, 1.0, 1.0}; // kg m^2
    double mass = 1.0;                            // kg

    void validate() const;
};

struct SatelliteParams {
    std::array<double, 3> inertia{1.0, 1.0, 1.0};    // body, kg m^2
    std::array<double, 3> rw_inertia{1.0, 1.0, 1.0}; // reaction wheels, kg m^2
    std::array<double, 3> damping{0.0, 0.0, 0.0};    // N m s
    std::array<double, 4> q_desired{0.0, 0.0, 0.0, 1.0}; // scalar-last

    void validate() const;
};

struct QuadcopterParams {
    std::array<double, 3> inertia{1.0, 1.0, 1.0};  // kg m^2
    std::array<double, 3> rot_drag{0.0, 0.0, 0.0}; // k_r, N m s
    std::array<double, 3> euler_desired{0.0, 0.0, 0.0}; // (psi, theta, phi) rad

    void validate() const;
};

struct UnicycleParams {
    double d_v = 0.0;     // 1/s
    double d_omega = 0.0; // 1/s
    std::array<double, 2> target{0.0, 0.0}; // (x_d, y_d) m

    void validate() const;
};

// Pitch guard for the 3-2-1 Euler kinematics, which divide by cos(theta).
inline constexpr double kEulerPitchMargin = 0.01; // rad short of pi/2

// ---- free operations (validating public API) ----

// f = [-I^-1 (Omega x I Omega); -(Omega x v)] (translational mass cancels).
Vec rigid_body_drift(const RigidBodyParams& p, const Vec& omega, const Vec& v);

// f = [-I^-1 (Omega x I Omega + Omega x I_RW Omega_RW + D Omega); 0].
Vec satellite_drift(const SatelliteParams& p, const Vec& omega, const Vec& omega_rw);

// u = [I^-1 tau; -I_RW^-1 tau]: wheel torque accelerates body and wheels
// with opposite signs.
Vec satellite_input_map(const SatelliteParams& p, const Vec& tau_rw);

// Qdot = 1/2 E(Q) Omega, scalar-last. Requires |q| = 1 within 1e-6.
Vec quaternion_kinematics(const Vec& q, const Vec& omega);

// Error quaternion via the 4x4 matrix product; both inputs unit within 1e-6.
Vec error_quaternion(const Vec& q, const Vec& q_desired);

// J = Qe1^2 + Qe2^2 + Qe3^2 of the error quaternion.
double satellite_objective(const Vec& q, const Vec& q_desired);

// f = -I^-1 (Omega x I Omega + k_r Omega).
Vec quad_drift(const QuadcopterParams& p, const Vec& omega);

// (psi_dot, theta_dot, phi_dot) of the 3-2-1 sequence. Throws
// KinematicSingularityError when |theta| >= pi/2 - kEulerPitchMargin.
Vec euler_kinematics(const Vec& eta, const Vec& omega);

double quad_objective(const Vec& eta, const Vec& eta_desired);

// f = (-d_Omega Omega, -d_v v).
Vec unicycle_drift(const UnicycleParams& p, double omega, double v);

// (x_dot, y_dot, theta_dot) = (v cos theta, v sin theta, Omega).
Vec unicycle_kinematics(const Vec& pose, double v, double omega);

double unicycle_objective(const Vec& pose, const std::array<double, 2>& target);

// ---- model cores ----
// Drift is templated on the scalar type so the finite-difference layer can
// probe it at extended precision.

namespace detail {

template <class T>
inline void cross3(const T* a, const T* b, T* out) {
    out[0] = a[1] * b[2] - a[2] * b[1];
    out[1] = a[2] * b[0] - a[0] * b[2];
    out[2] = a[0] * b[1] - a[1] * b[0];
}

} // namespace detail

// Generic rigid body: vel = [Omega(3), v(3)], kin = quaternion. Objective is
// the attitude error against q_desired (the custom scenario supplies it).
struct RigidBodyModel {
    static constexpr std::size_t n = 6;
    static constexpr std::size_t m = 4;
    static constexpr bool is_quaternion = true;

    RigidBodyParams p;
    std::array<double, 4> q_desired{0.0, 0.0, 0.0, 1.0};

    template <class T>
    void drift(const T* vel, T* out) const {
        T iw[3] = {T(p.inertia[0]) * vel[0], T(p.inertia[1]) * vel[1], T(p.inertia[2]) * vel[2]};
        T c[3];
        detail::cross3(vel, iw, c);
        for (int i = 0; i < 3; ++i) out[i] = -c[i] / T(p.inertia[i]);
        detail::cross3(vel, vel + 3, c);
        for (int i = 0; i < 3; ++i) out[3 + i] = -c[i];
    }

    void kin_rate(const double* kin, const double* vel, double* out) const;
    double objective(const double* kin) const;
    std::vector<std::size_t> objective_coords() const { return {0, 1, 2, 3}; }
    void normalize_kin(double* kin) const;
    std::vector<std::string> vel_names() const;
    std::vector<std::string> kin_names() const;
};

// Satellite with reaction wheels: vel = [Omega(3), Omega_RW(3)], kin = Q.
struct SatelliteModel {
    static constexpr std::size_t n = 6;
    static constexpr std::size_t m = 4;
    static constexpr bool is_quaternion = true;

    SatelliteParams p;

    template <class T>
    void drift(const T* vel, T* out) const {
        T iw[3] = {T(p.inertia[0]) * vel[0], T(p.inertia[1]) * vel[1], T(p.inertia[2]) * vel[2]};
        T hw[3] = {T(p.rw_inertia[0]) * vel[3], T(p.rw_inertia[1]) * vel[4],
                   T(p.rw_inertia[2]) * vel[5]};
        T c1[3], c2[3];
        detail::cross3(vel, iw, c1);
        detail::cross3(vel, hw, c2);
        for (int i = 0; i < 3; ++i)
            out[i] = -(c1[i] + c2[i] + T(p.damping[i]) * vel[i]) / T(p.inertia[i]);
        for (int i = 3; i < 6; ++i) out[i] = T(0); // wheel block carries no drift
    }

    void kin_rate(const double* kin, const double* vel, double* out) const;
    double objective(const double* kin) const;
    std::vector<std::size_t> objective_coords() const { return {0, 1, 2, 3}; }
    void normalize_kin(double* kin) const;
    std::vector<std::string> vel_names() const;
    std::vector<std::string> kin_names() const;
};

// Quadcopter attitude: vel = Omega(3), kin = (psi, theta, phi).
struct QuadcopterModel {
    static constexpr std::size_t n = 3;
    static constexpr std::size_t m = 3;
    static constexpr bool is_quaternion = false;

    QuadcopterParams p;

    template <class T>
    void drift(const T* vel, T* out) const {
        T iw[3] = {T(p.inertia[0]) * vel[0], T(p.inertia[1]) * vel[1], T(p.inertia[2]) * vel[2]};
        T c[3];
        detail::cross3(vel, iw, c);
        for (int i = 0; i < 3; ++i)
            out[i] = -(c[i] + T(p.rot_drag[i]) * vel[i]) / T(p.inertia[i]);
    }

    void kin_rate(const double* kin, const double* vel, double* out) const;
    double objective(const double* kin) const;
    std::vector<std::size_t> objective_coords() const { return {0, 1, 2}; }
    void normalize_kin(double*) const {}
    std::vector<std::string> vel_names() const;
    std::vector<std::string> kin_names() const;
};

// Acceleration-controlled unicycle: vel = (v, Omega), kin = (x, y, theta).
// Velocity ordering follows the parameter tables (translational channel
// first); the standalone unicycle_drift op keeps its own (Omega, v) argument
// order.
struct UnicycleModel {
    static constexpr std::size_t n = 2;
    static constexpr std::size_t m = 3;
    static constexpr bool is_quaternion = false;

    UnicycleParams p;

    template <class T>
    void drift(const T* vel, T* out) const {
        out[0] = -T(p.d_v) * vel[0];
        out[1] = -T(p.d_omega) * vel[1];
    }

    void kin_rate(const double* kin, const double* vel, double* out) const;
    double objective(const double* kin) const;
    std::vector<std::size_t> objective_coords() const { return {0, 1}; }
    void normalize_kin(double*) const {}
    std::vector<std::string> vel_names() const;
    std::vector<std::string> kin_names() const;
};

} // namespace escvs
