#pragma once

#include <optional>
#include <string>
#include <vector>

#include "escvs/vec.hpp"

namespace escvs {

// Gains of the extremum-seeking loop. a and c are per-input-channel
// (dither amplitude and feedback gain), k scales the adaptation law and
// omega is the dither frequency in rad/s. hpf_gain, when set, enables the
// washout-filter variant of the adaptation law.
struct EscVsParams {
    Vec a;
    Vec c;
    double k = 0.0;
    double omega = 0.0;
    std::optional<double> hpf_gain;

    // Throws ValidationError on inconsistent gains (size mismatch, omega <= 0,
    // k < 0, non-finite entries, non-positive hpf_gain).
    void validate() const;

    // Non-fatal diagnostics. Flags channels where |c_i| < |a_i|: the
    // feedback term is then weaker than the dither amplitude, which is
    // outside the gain ordering the averaging analysis assumes.
    std::vector<std::string> warnings() const;
};

struct HpfRates {
    double u_hat_dot = 0.0;
    double h_dot = 0.0;
};

// u_i(t) = c_i * u_hat + a_i * omega * cos(omega t)
Vec control_input(const EscVsParams& params, double u_hat, double t);

// u_hat_dot = k * J * omega * cos(omega t)
double adapt(const EscVsParams& params, double J, double t);

// Washout variant: h_dot = -e h + J, u_hat_dot = k (J - e h) omega cos(omega t).
// Throws ValidationError when hpf_gain is not set.
HpfRates adapt_hpf(const EscVsParams& params, double J, double h, double t);

} // namespace escvs
