#pragma once

#include <stdexcept>
#include <string>

namespace escvs {

// Error taxonomy maps onto the CLI exit-code contract:
// validation -> 2, numeric -> 3, I/O -> 4.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class IntegrationDivergedError : public NumericError {
public:
    IntegrationDivergedError(double t, std::size_t component)
        : NumericError("integration diverged: non-finite value in component " +
                       std::to_string(component) + " at t=" + std::to_string(t) + " s"),
          t_s(t), component(component) {}

    double t_s;
    std::size_t component;
};

class KinematicSingularityError : public NumericError {
public:
    explicit KinematicSingularityError(double pitch_rad)
        : NumericError("kinematic singularity: pitch " + std::to_string(pitch_rad) +
                       " rad within guard margin of pi/2"),
          pitch_rad(pitch_rad), has_time(false), t_s(0.0) {}

    KinematicSingularityError(double pitch_rad, double t)
        : NumericError("kinematic singularity: pitch " + std::to_string(pitch_rad) +
                       " rad within guard margin of pi/2 at t=" + std::to_string(t) + " s"),
          pitch_rad(pitch_rad), has_time(true), t_s(t) {}

    double pitch_rad;
    bool has_time;
    double t_s;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace escvs
