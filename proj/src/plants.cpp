#include "escvs/plants.hpp"

#include <cmath>

namespace escvs {

namespace {

// Loose enough to accept reference initial attitudes quoted to four digits
// (the published Q(0) is off unit norm by about 1e-5).
constexpr double kUnitQuatTol = 1e-4;

void require_size(const Vec& v, std::size_t want, const char* what) {
    if (v.size() != want)
        throw ValidationError(std::string(what) + " must have length " + std::to_string(want));
}

double norm4(const double* q) {
    return std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
}

void require_unit(const Vec& q, const char* what) {
    require_size(q, 4, what);
    if (std::abs(norm4(q.data()) - 1.0) > kUnitQuatTol)
        throw NumericError(std::string(what) + " is not a unit quaternion (norm " +
                           std::to_string(norm4(q.data())) + ")");
}

// Qdot = 1/2 E(Q) Omega with E as in the scalar-last convention.
void quat_rate(const double* q, const double* w, double* out) {
    out[0] = 0.5 * (q[3] * w[0] - q[2] * w[1] + q[1] * w[2]);
    out[1] = 0.5 * (q[2] * w[0] + q[3] * w[1] - q[0] * w[2]);
    out[2] = 0.5 * (-q[1] * w[0] + q[0] * w[1] + q[3] * w[2]);
    out[3] = 0.5 * (-q[0] * w[0] - q[1] * w[1] - q[2] * w[2]);
}

// Error quaternion: the 4x4 matrix of the desired attitude applied to Q.
void err_quat(const double* q, const double* d, double* out) {
    out[0] = d[3] * q[0] + d[2] * q[1] - d[1] * q[2] - d[0] * q[3];
    out[1] = -d[2] * q[0] + d[3] * q[1] + d[0] * q[2] - d[1] * q[3];
    out[2] = d[1] * q[0] - d[0] * q[1] + d[3] * q[2] - d[2] * q[3];
    out[3] = d[0] * q[0] + d[1] * q[1] + d[2] * q[2] + d[3] * q[3];
}

double attitude_objective(const double* q, const double* d) {
    double e[4];
    err_quat(q, d, e);
    return e[0] * e[0] + e[1] * e[1] + e[2] * e[2];
}

void renorm4(double* q) {
    const double s = 1.0 / norm4(q);
    for (int i = 0; i < 4; ++i) q[i] *= s;
}

// (psi_dot, theta_dot, phi_dot) of the 3-2-1 sequence; guards the cos(theta)
// division.
void euler_rate(const double* eta, const double* w, double* out) {
    const double theta = eta[1];
    if (std::abs(theta) >= M_PI_2 - kEulerPitchMargin)
        throw KinematicSingularityError(theta);
    const double sphi = std::sin(eta[2]), cphi = std::cos(eta[2]);
    const double stheta = std::sin(theta), ctheta = std::cos(theta);
    out[0] = (sphi * w[1] + cphi * w[2]) / ctheta;
    out[1] = cphi * w[1] - sphi * w[2];
    out[2] = w[0] + (sphi * w[1] + cphi * w[2]) * stheta / ctheta;
}

void require_positive(const std::array<double, 3>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x) || x <= 0.0)
            throw ValidationError(std::string(what) + " entries must be positive");
}

void require_nonnegative(const std::array<double, 3>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x) || x < 0.0)
            throw ValidationError(std::string(what) + " entries must be nonnegative");
}

} // namespace

void RigidBodyParams::validate() const {
    require_positive(inertia, "inertia");
    if (!std::isfinite(mass) || mass <= 0.0) throw ValidationError("mass must be positive");
}

void SatelliteParams::validate() const {
    require_positive(inertia, "inertia");
    require_positive(rw_inertia, "rw_inertia");
    require_nonnegative(damping, "damping");
    if (std::abs(norm4(q_desired.data()) - 1.0) > kUnitQuatTol)
        throw ValidationError("q_desired must be a unit quaternion");
}

void QuadcopterParams::validate() const {
    require_positive(inertia, "inertia");
    require_nonnegative(rot_drag, "rot_drag");
    for (double x : euler_desired)
        if (!std::isfinite(x)) throw ValidationError("euler_desired must be finite");
    if (std::abs(euler_desired[1]) >= M_PI_2 - kEulerPitchMargin)
        throw ValidationError("euler_desired pitch sits inside the singularity guard");
}

void UnicycleParams::validate() const {
    if (!std::isfinite(d_v) || d_v < 0.0) throw ValidationError("d_v must be nonnegative");
    if (!std::isfinite(d_omega) || d_omega < 0.0)
        throw ValidationError("d_omega must be nonnegative");
    for (double x : target)
        if (!std::isfinite(x)) throw ValidationError("target must be finite");
}

Vec rigid_body_drift(const RigidBodyParams& p, const Vec& omega, const Vec& v) {
    p.validate();
    require_size(omega, 3, "omega");
    require_size(v, 3, "v");
    RigidBodyModel model{p, {0.0, 0.0, 0.0, 1.0}};
    double vel[6] = {omega[0], omega[1], omega[2], v[0], v[1], v[2]};
    Vec out(6);
    model.drift<double>(vel, out.data());
    return out;
}

Vec satellite_drift(const SatelliteParams& p, const Vec& omega, const Vec& omega_rw) {
    p.validate();
    require_size(omega, 3, "omega");
    require_size(omega_rw, 3, "omega_rw");
    SatelliteModel model{p};
    double vel[6] = {omega[0], omega[1], omega[2], omega_rw[0], omega_rw[1], omega_rw[2]};
    Vec out(6);
    model.drift<double>(vel, out.data());
    return out;
}

Vec satellite_input_map(const SatelliteParams& p, const Vec& tau_rw) {
    p.validate();
    require_size(tau_rw, 3, "tau_rw");
    Vec out(6);
    for (int i = 0; i < 3; ++i) {
        out[i] = tau_rw[i] / p.inertia[i];
        out[3 + i] = -tau_rw[i] / p.rw_inertia[i];
    }
    return out;
}

Vec quaternion_kinematics(const Vec& q, const Vec& omega) {
    require_unit(q, "q");
    require_size(omega, 3, "omega");
    Vec out(4);
    quat_rate(q.data(), omega.data(), out.data());
    return out;
}

Vec error_quaternion(const Vec& q, const Vec& q_desired) {
    require_unit(q, "q");
    require_unit(q_desired, "q_desired");
    Vec out(4);
    err_quat(q.data(), q_desired.data(), out.data());
    return out;
}

double satellite_objective(const Vec& q, const Vec& q_desired) {
    require_unit(q, "q");
    require_unit(q_desired, "q_desired");
    return attitude_objective(q.data(), q_desired.data());
}

Vec quad_drift(const QuadcopterParams& p, const Vec& omega) {
    p.validate();
    require_size(omega, 3, "omega");
    QuadcopterModel model{p};
    Vec out(3);
    model.drift<double>(omega.data(), out.data());
    return out;
}

Vec euler_kinematics(const Vec& eta, const Vec& omega) {
    require_size(eta, 3, "eta");
    require_size(omega, 3, "omega");
    Vec out(3);
    euler_rate(eta.data(), omega.data(), out.data());
    return out;
}

double quad_objective(const Vec& eta, const Vec& eta_desired) {
    require_size(eta, 3, "eta");
    require_size(eta_desired, 3, "eta_desired");
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double d = eta[i] - eta_desired[i];
        s += d * d;
    }
    return s;
}

Vec unicycle_drift(const UnicycleParams& p, double omega, double v) {
    p.validate();
    return {-p.d_omega * omega, -p.d_v * v};
}

Vec unicycle_kinematics(const Vec& pose, double v, double omega) {
    require_size(pose, 3, "pose");
    return {v * std::cos(pose[2]), v * std::sin(pose[2]), omega};
}

double unicycle_objective(const Vec& pose, const std::array<double, 2>& target) {
    if (pose.size() < 2) throw ValidationError("pose must have at least x and y");
    const double dx = pose[0] - target[0];
    const double dy = pose[1] - target[1];
    return dx * dx + dy * dy;
}

// ---- RigidBodyModel ----

void RigidBodyModel::kin_rate(const double* kin, const double* vel, double* out) const {
    quat_rate(kin, vel, out);
}

double RigidBodyModel::objective(const double* kin) const {
    return attitude_objective(kin, q_desired.data());
}

void RigidBodyModel::normalize_kin(double* kin) const { renorm4(kin); }

std::vector<std::string> RigidBodyModel::vel_names() const {
    return {"omega_x_rad_per_s", "omega_y_rad_per_s", "omega_z_rad_per_s",
            "v_x_m_per_s", "v_y_m_per_s", "v_z_m_per_s"};
}

std::vector<std::string> RigidBodyModel::kin_names() const { return {"q1", "q2", "q3", "q4"}; }

// ---- SatelliteModel ----

void SatelliteModel::kin_rate(const double* kin, const double* vel, double* out) const {
    quat_rate(kin, vel, out); // wheels do not enter the attitude kinematics
}

double SatelliteModel::objective(const double* kin) const {
    return attitude_objective(kin, p.q_desired.data());
}

void SatelliteModel::normalize_kin(double* kin) const { renorm4(kin); }

std::vector<std::string> SatelliteModel::vel_names() const {
    return {"omega_x_rad_per_s", "omega_y_rad_per_s", "omega_z_rad_per_s",
            "omega_rw_x_rad_per_s", "omega_rw_y_rad_per_s", "omega_rw_z_rad_per_s"};
}

std::vector<std::string> SatelliteModel::kin_names() const { return {"q1", "q2", "q3", "q4"}; }

// ---- QuadcopterModel ----

void QuadcopterModel::kin_rate(const double* kin, const double* vel, double* out) const {
    euler_rate(kin, vel, out);
}

double QuadcopterModel::objective(const double* kin) const {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double d = kin[i] - p.euler_desired[i];
        s += d * d;
    }
    return s;
}

std::vector<std::string> QuadcopterModel::vel_names() const {
    return {"omega_x_rad_per_s", "omega_y_rad_per_s", "omega_z_rad_per_s"};
}

std::vector<std::string> QuadcopterModel::kin_names() const {
    return {"psi_rad", "theta_rad", "phi_rad"};
}

// ---- UnicycleModel ----

void UnicycleModel::kin_rate(const double* kin, const double* vel, double* out) const {
    out[0] = vel[0] * std::cos(kin[2]);
    out[1] = vel[0] * std::sin(kin[2]);
    out[2] = vel[1];
}

double UnicycleModel::objective(const double* kin) const {
    const double dx = kin[0] - p.target[0];
    const double dy = kin[1] - p.target[1];
    return dx * dx + dy * dy;
}

std::vector<std::string> UnicycleModel::vel_names() const {
    return {"v_m_per_s", "omega_rad_per_s"};
}

std::vector<std::string> UnicycleModel::kin_names() const { return {"x_m", "y_m", "theta_rad"}; }

} // namespace escvs
