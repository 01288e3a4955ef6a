#include "escvs/simulate.hpp"

#include <cmath>
#include <numbers>

#include "escvs/errors.hpp"
#include "escvs/integrator.hpp"

namespace escvs {

double default_dt(double omega) { return (2.0 * std::numbers::pi / omega) / 200.0; }

double final_window_mean(const std::vector<double>& times, const std::vector<double>& values) {
    if (times.empty() || times.size() != values.size())
        throw ValidationError("final_window_mean needs aligned, nonempty arrays");
    const double cutoff = times.back() - 0.1 * (times.back() - times.front());
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] >= cutoff) {
            sum += values[i];
            ++count;
        }
    }
    return sum / static_cast<double>(count);
}

Trajectory simulate(const Plant& plant, const EscVsParams& params, const SimState& x0,
                    double t_final, double dt, std::size_t decimate) {
    params.validate();
    const std::size_t n = plant.vel_dim();
    const std::size_t m = plant.kin_dim();
    if (params.a.size() != n)
        throw ValidationError("controller gain length does not match the plant's velocity count");
    if (x0.qdot.size() != n) throw ValidationError("x0.qdot length does not match the plant");
    if (x0.kin.size() != m) throw ValidationError("x0.kin length does not match the plant");
    if (params.hpf_gain.has_value() != x0.h.has_value())
        throw ValidationError("filter state h must be present exactly when hpf_gain is set");
    if (!(t_final > 0.0)) throw ValidationError("t_final must be positive");
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");
    if (dt > (2.0 * std::numbers::pi / params.omega) / 20.0 + 1e-15)
        throw ValidationError("dt must resolve the perturbation with at least 20 steps/period");
    if (decimate == 0) throw ValidationError("decimate must be at least 1");

    const bool hpf = params.hpf_gain.has_value();
    const std::size_t dim = n + m + 1 + (hpf ? 1 : 0);

    Vec x(dim);
    for (std::size_t i = 0; i < n; ++i) x[i] = x0.qdot[i];
    for (std::size_t i = 0; i < m; ++i) x[n + i] = x0.kin[i];
    x[n + m] = x0.u_hat;
    if (hpf) x[n + m + 1] = *x0.h;
    plant.normalize_kin(x.data() + n);

    // Round the step count up to a whole number of recording intervals so the
    // final sample always lands on the grid.
    auto steps = static_cast<std::size_t>(std::llround(t_final / dt));
    if (steps == 0) steps = 1;
    if (steps % decimate != 0) steps += decimate - steps % decimate;

    const double w = params.omega;
    const double k = params.k;
    const double e = hpf ? *params.hpf_gain : 0.0;

    auto rhs = [&](const Vec& s, double t, Vec& d) {
        const double* vel = s.data();
        const double* kin = s.data() + n;
        plant.drift(vel, d.data());
        const double osc = w * std::cos(w * t);
        const double u_hat = s[n + m];
        for (std::size_t i = 0; i < n; ++i) d[i] += params.c[i] * u_hat + params.a[i] * osc;
        plant.kin_rate(kin, vel, d.data() + n);
        const double J = plant.objective(kin);
        if (hpf) {
            const double h = s[n + m + 1];
            d[n + m] = k * (J - e * h) * osc;
            d[n + m + 1] = -e * h + J;
        } else {
            d[n + m] = k * J * osc;
        }
    };

    Trajectory traj;
    traj.dt = dt * static_cast<double>(decimate);
    const std::size_t samples = steps / decimate + 1;
    traj.times.reserve(samples);
    traj.states.reserve(samples);
    traj.inputs.reserve(samples);
    traj.objective.reserve(samples);

    auto record = [&](std::size_t step) {
        const double t = static_cast<double>(step) * dt;
        traj.times.push_back(t);
        SimState st;
        st.qdot.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
        st.kin.assign(x.begin() + static_cast<std::ptrdiff_t>(n),
                      x.begin() + static_cast<std::ptrdiff_t>(n + m));
        st.u_hat = x[n + m];
        if (hpf) st.h = x[n + m + 1];
        traj.states.push_back(std::move(st));
        traj.inputs.push_back(control_input(params, x[n + m], t));
        traj.objective.push_back(plant.objective(x.data() + n));
    };

    detail::Rk4Workspace work(dim);
    record(0);
    for (std::size_t step = 0; step < steps; ++step) {
        const double t = static_cast<double>(step) * dt;
        try {
            detail::rk4_step_inplace(rhs, x, t, dt, work);
        } catch (const KinematicSingularityError& ex) {
            if (ex.has_time) throw;
            throw KinematicSingularityError(ex.pitch_rad, t);
        }
        plant.normalize_kin(x.data() + n);
        if ((step + 1) % decimate == 0) record(step + 1);
    }
    return traj;
}

} // namespace escvs
