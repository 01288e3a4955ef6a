#include "escvs/controller.hpp"

#include <cmath>

#include "escvs/errors.hpp"

namespace escvs {

namespace {

bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace

void EscVsParams::validate() const {
    if (a.size() != c.size())
        throw ValidationError("gain vectors a and c must have the same length (got " +
                              std::to_string(a.size()) + " and " + std::to_string(c.size()) + ")");
    if (a.empty()) throw ValidationError("gain vectors must not be empty");
    if (!all_finite(a)) throw ValidationError("gain vector a has a non-finite entry");
    if (!all_finite(c)) throw ValidationError("gain vector c has a non-finite entry");
    if (!std::isfinite(omega) || omega <= 0.0)
        throw ValidationError("omega must be positive and finite");
    // k = 0 is allowed so that unforced (zero-gain) scenarios stay runnable.
    if (!std::isfinite(k) || k < 0.0) throw ValidationError("k must be nonnegative and finite");
    if (hpf_gain && (!std::isfinite(*hpf_gain) || *hpf_gain <= 0.0))
        throw ValidationError("hpf_gain must be positive when present");
}

std::vector<std::string> EscVsParams::warnings() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(c[i]) < std::abs(a[i]))
            out.push_back("gain ordering: |c[" + std::to_string(i) + "]| < |a[" +
                          std::to_string(i) + "]|; the feedback gain is expected to dominate "
                          "the oscillatory gain");
    }
    return out;
}

Vec control_input(const EscVsParams& params, double u_hat, double t) {
    const double osc = params.omega * std::cos(params.omega * t);
    Vec u(params.a.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = params.c[i] * u_hat + params.a[i] * osc;
    return u;
}

double adapt(const EscVsParams& params, double J, double t) {
    return params.k * J * params.omega * std::cos(params.omega * t);
}

HpfRates adapt_hpf(const EscVsParams& params, double J, double h, double t) {
    if (!params.hpf_gain)
        throw ValidationError("adapt_hpf requires hpf_gain to be configured");
    const double e = *params.hpf_gain;
    HpfRates r;
    r.u_hat_dot = params.k * (J - e * h) * params.omega * std::cos(params.omega * t);
    r.h_dot = -e * h + J;
    return r;
}

} // namespace escvs
