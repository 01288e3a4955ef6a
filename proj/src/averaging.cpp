#include "escvs/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "escvs/errors.hpp"
#include "escvs/integrator.hpp"

namespace escvs {

namespace {

constexpr double kLyapunovDt = 1e-3;
constexpr double kLyapunovStepTol = 1e-6;

double max_abs(const double* v, std::size_t len) {
    double m = 0.0;
    for (std::size_t i = 0; i < len; ++i) m = std::max(m, std::abs(v[i]));
    return m;
}

// Reused buffers for the finite-difference helpers; the averaged RHS runs
// inside RK4 at dt = 1e-3 for Lyapunov checks, so per-call allocation adds up.
struct FdScratch {
    std::vector<long double> vp, vm, fp, fm, f0;
    Vec dir, probe, e;

    FdScratch(std::size_t n, std::size_t m)
        : vp(n), vm(n), fp(n), fm(n), f0(n), dir(m), probe(m), e(n, 0.0) {}
};

// Directional second difference of the drift along a, written into out:
// out_i = d^2/ds^2 f_i(qdot + s a) at s = 0, i.e. (M22 A)_i. Long double
// keeps the cancellation error near 1e-9 relative at the default step.
void m22_times_a(const Plant& plant, const double* qdot, const Vec& a, double fd_step,
                 FdScratch& s, double* out) {
    const std::size_t n = plant.vel_dim();
    const double amax = max_abs(a.data(), n);
    if (amax == 0.0) {
        std::fill(out, out + n, 0.0);
        return;
    }
    const double h = fd_step * std::max(1.0, max_abs(qdot, n)) / amax;
    for (std::size_t i = 0; i < n; ++i) {
        const long double base = static_cast<long double>(qdot[i]);
        const long double step = static_cast<long double>(h) * static_cast<long double>(a[i]);
        s.vp[i] = base + step;
        s.vm[i] = base - step;
    }
    plant.drift_ld(s.vp.data(), s.fp.data());
    plant.drift_ld(s.vm.data(), s.fm.data());
    for (std::size_t i = 0; i < n; ++i) s.vp[i] = static_cast<long double>(qdot[i]);
    plant.drift_ld(s.vp.data(), s.f0.data());
    const long double h2 = static_cast<long double>(h) * static_cast<long double>(h);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = static_cast<double>((s.fp[i] - 2.0L * s.f0[i] + s.fm[i]) / h2);
        if (!std::isfinite(out[i]))
            throw NumericError("non-finite drift during finite differencing");
    }
}

// Pushforward gradient, written into g: g_i = dJ(kin + s * kin_rate(kin, e_i))/ds
// at s = 0. The objectives are quadratic, so the central difference is exact
// up to rounding for any step.
void pushforward_into(const Plant& plant, const double* kin, FdScratch& s, double* g) {
    const std::size_t n = plant.vel_dim();
    const std::size_t m = plant.kin_dim();
    const double h = 1e-5 * std::max(1.0, max_abs(kin, m));
    for (std::size_t i = 0; i < n; ++i) {
        s.e[i] = 1.0;
        plant.kin_rate(kin, s.e.data(), s.dir.data());
        s.e[i] = 0.0;
        for (std::size_t j = 0; j < m; ++j) s.probe[j] = kin[j] + h * s.dir[j];
        const double jp = plant.objective(s.probe.data());
        for (std::size_t j = 0; j < m; ++j) s.probe[j] = kin[j] - h * s.dir[j];
        const double jm = plant.objective(s.probe.data());
        g[i] = (jp - jm) / (2.0 * h);
        if (!std::isfinite(g[i])) throw NumericError("non-finite objective during differencing");
    }
}

// Shared averaged right-hand side working on preallocated buffers.
struct AveragedRhs {
    const AveragedSystem& sys;
    std::size_t n, m;
    bool hpf;
    mutable FdScratch scratch;
    mutable Vec m22a, g;

    explicit AveragedRhs(const AveragedSystem& s)
        : sys(s), n(s.plant->vel_dim()), m(s.plant->kin_dim()),
          hpf(s.hpf_gain.has_value()), scratch(n, m), m22a(n), g(n) {}

    void operator()(const Vec& x, double, Vec& d) const {
        const Plant& plant = *sys.plant;
        const double* vel = x.data();
        const double* kin = x.data() + n;
        const double u_bar = x[n + m];

        plant.drift(vel, d.data());
        m22_times_a(plant, vel, sys.a, sys.fd_step, scratch, m22a.data());
        for (std::size_t i = 0; i < n; ++i) d[i] += sys.c[i] * u_bar + 0.25 * m22a[i];

        plant.kin_rate(kin, vel, d.data() + n);

        pushforward_into(plant, kin, scratch, g.data());
        double ga = 0.0;
        for (std::size_t i = 0; i < n; ++i) ga += g[i] * sys.a[i];
        d[n + m] = -0.5 * sys.k * ga;

        if (hpf) d[n + m + 1] = -*sys.hpf_gain * x[n + m + 1] + plant.objective(kin);
    }
};

} // namespace

void AveragedSystem::validate() const {
    if (plant == nullptr) throw ValidationError("averaged system has no plant");
    if (a.size() != plant->vel_dim() || c.size() != plant->vel_dim())
        throw ValidationError("averaged gains must match the plant's velocity count");
    if (!(fd_step > 0.0)) throw ValidationError("fd_step must be positive");
    if (!std::isfinite(k) || k < 0.0) throw ValidationError("k must be nonnegative and finite");
}

AveragedSystem make_averaged(const Plant& plant, const EscVsParams& params) {
    params.validate();
    AveragedSystem sys;
    sys.plant = &plant;
    sys.a = params.a;
    sys.c = params.c;
    sys.k = params.k;
    sys.hpf_gain = params.hpf_gain;
    sys.validate();
    return sys;
}

Mat m22(const Plant& plant, const Vec& kin, const Vec& qdot, const Vec& a, double fd_step) {
    const std::size_t n = plant.vel_dim();
    if (qdot.size() != n) throw ValidationError("qdot length does not match the plant");
    if (a.size() != n) throw ValidationError("gain vector length does not match the plant");
    if (kin.size() != plant.kin_dim()) throw ValidationError("kin length does not match the plant");
    if (!(fd_step > 0.0)) throw ValidationError("fd_step must be positive");

    // Mixed central differences at the widest available precision; the
    // second derivatives of a velocity-quadratic drift are constants, so the
    // only error left is rounding in the difference quotient.
    Mat out(n, Vec(n, 0.0));
    std::vector<widest> x(n);
    Vec h(n);
    for (std::size_t j = 0; j < n; ++j) h[j] = fd_step * std::max(1.0, std::abs(qdot[j]));

    auto eval = [&](std::size_t kk, double sk, std::size_t jj, double sj, std::vector<widest>& dst) {
        for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<widest>(qdot[i]);
        x[kk] += static_cast<widest>(sk * h[kk]);
        x[jj] += static_cast<widest>(sj * h[jj]);
        plant.drift_w(x.data(), dst.data());
    };

    std::vector<widest> fpp(n), fpm(n), fmp(n), fmm(n);
    for (std::size_t kk = 0; kk < n; ++kk) {
        for (std::size_t j = 0; j < n; ++j) {
            if (a[j] == 0.0) continue;
            if (kk == j) {
                eval(kk, 1.0, kk, 1.0, fpp);   // center + 2h
                eval(kk, 0.0, kk, 0.0, fpm);   // center
                eval(kk, -1.0, kk, -1.0, fmm); // center - 2h
                const widest hh = static_cast<widest>(2.0 * h[kk]);
                for (std::size_t i = 0; i < n; ++i) {
                    const widest d2 = (fpp[i] - widest(2) * fpm[i] + fmm[i]) / (hh * hh);
                    out[i][kk] += static_cast<double>(d2) * a[j];
                }
            } else {
                eval(kk, 1.0, j, 1.0, fpp);
                eval(kk, 1.0, j, -1.0, fpm);
                eval(kk, -1.0, j, 1.0, fmp);
                eval(kk, -1.0, j, -1.0, fmm);
                const widest denom =
                    widest(4) * static_cast<widest>(h[kk]) * static_cast<widest>(h[j]);
                for (std::size_t i = 0; i < n; ++i) {
                    const widest d2 = (fpp[i] - fpm[i] - fmp[i] + fmm[i]) / denom;
                    out[i][kk] += static_cast<double>(d2) * a[j];
                }
            }
        }
    }
    for (const auto& row : out)
        for (double v : row)
            if (!std::isfinite(v)) throw NumericError("non-finite drift during finite differencing");
    return out;
}

Vec grad_objective(const Plant& plant, const Vec& kin) {
    if (kin.size() != plant.kin_dim()) throw ValidationError("kin length does not match the plant");
    const auto coords = plant.objective_coords();
    Vec g(coords.size());
    Vec probe = kin;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const std::size_t ci = coords[i];
        const double h = 1e-6 * std::max(1.0, std::abs(kin[ci]));
        probe[ci] = kin[ci] + h;
        const double jp = plant.objective(probe.data());
        probe[ci] = kin[ci] - h;
        const double jm = plant.objective(probe.data());
        probe[ci] = kin[ci];
        g[i] = (jp - jm) / (2.0 * h);
        if (!std::isfinite(g[i])) throw NumericError("non-finite objective during differencing");
    }
    return g;
}

Vec pushforward_grad(const Plant& plant, const Vec& kin) {
    if (kin.size() != plant.kin_dim()) throw ValidationError("kin length does not match the plant");
    Vec g(plant.vel_dim());
    FdScratch scratch(plant.vel_dim(), plant.kin_dim());
    pushforward_into(plant, kin.data(), scratch, g.data());
    return g;
}

Vec averaged_rhs(const AveragedSystem& sys, const Vec& state, double t) {
    sys.validate();
    const std::size_t n = sys.plant->vel_dim();
    const std::size_t m = sys.plant->kin_dim();
    const std::size_t dim = n + m + 1 + (sys.hpf_gain ? 1 : 0);
    if (state.size() != dim)
        throw ValidationError("averaged state must have length " + std::to_string(dim));
    Vec d(dim);
    AveragedRhs rhs(sys);
    rhs(state, t, d);
    return d;
}

Trajectory simulate_averaged(const AveragedSystem& sys, const SimState& x0, double t_final,
                             double dt, std::size_t decimate) {
    sys.validate();
    const Plant& plant = *sys.plant;
    const std::size_t n = plant.vel_dim();
    const std::size_t m = plant.kin_dim();
    if (x0.qdot.size() != n) throw ValidationError("x0.qdot length does not match the plant");
    if (x0.kin.size() != m) throw ValidationError("x0.kin length does not match the plant");
    if (sys.hpf_gain.has_value() != x0.h.has_value())
        throw ValidationError("filter state h must be present exactly when hpf_gain is set");
    if (!(t_final > 0.0)) throw ValidationError("t_final must be positive");
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");
    if (decimate == 0) throw ValidationError("decimate must be at least 1");

    const bool hpf = sys.hpf_gain.has_value();
    const std::size_t dim = n + m + 1 + (hpf ? 1 : 0);
    Vec x(dim);
    for (std::size_t i = 0; i < n; ++i) x[i] = x0.qdot[i];
    for (std::size_t i = 0; i < m; ++i) x[n + i] = x0.kin[i];
    x[n + m] = x0.u_hat;
    if (hpf) x[n + m + 1] = *x0.h;
    plant.normalize_kin(x.data() + n);

    auto steps = static_cast<std::size_t>(std::llround(t_final / dt));
    if (steps == 0) steps = 1;
    if (steps % decimate != 0) steps += decimate - steps % decimate;

    AveragedRhs rhs(sys);
    Trajectory traj;
    traj.dt = dt * static_cast<double>(decimate);

    auto record = [&](std::size_t step) {
        traj.times.push_back(static_cast<double>(step) * dt);
        SimState st;
        st.qdot.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
        st.kin.assign(x.begin() + static_cast<std::ptrdiff_t>(n),
                      x.begin() + static_cast<std::ptrdiff_t>(n + m));
        st.u_hat = x[n + m];
        if (hpf) st.h = x[n + m + 1];
        traj.states.push_back(std::move(st));
        Vec u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = sys.c[i] * x[n + m];
        traj.inputs.push_back(std::move(u));
        traj.objective.push_back(plant.objective(x.data() + n));
    };

    detail::Rk4Workspace work(dim);
    record(0);
    for (std::size_t step = 0; step < steps; ++step) {
        detail::rk4_step_inplace(rhs, x, static_cast<double>(step) * dt, dt, work);
        plant.normalize_kin(x.data() + n);
        if ((step + 1) % decimate == 0) record(step + 1);
    }
    return traj;
}

ClosenessReport closeness_sweep(const Plant& plant, const EscVsParams& params, const SimState& x0,
                                double t_final, const std::vector<double>& omegas) {
    params.validate();
    if (omegas.size() < 3) throw ValidationError("closeness_sweep needs at least 3 frequencies");
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        if (!(omegas[i] > 0.0)) throw ValidationError("frequencies must be positive");
        if (i > 0 && omegas[i] <= omegas[i - 1])
            throw ValidationError("frequencies must be strictly increasing");
    }
    if (!(t_final > 0.0)) throw ValidationError("t_final must be positive");

    const std::size_t n = plant.vel_dim();
    const std::size_t m = plant.kin_dim();
    const bool hpf = params.hpf_gain.has_value();
    const double e = hpf ? *params.hpf_gain : 0.0;

    AveragedSystem sys = make_averaged(plant, params);
    const double dt_avg = (2.0 * std::numbers::pi / omegas.front()) / 200.0;
    const Trajectory avg = simulate_averaged(sys, x0, t_final, dt_avg, 1);

    // Slow amplitude of the u_hat oscillation predicted by the averaging
    // transform: k * (J_bar - e h_bar), or k * J_bar without the filter. The
    // velocity channels carry a_i sin(wt) for the same reason. Comparing
    // against the transformed averaged state is what decays as 1/w; the raw
    // difference saturates at the oscillation amplitude itself.
    std::vector<double> mbar(avg.size());
    for (std::size_t i = 0; i < avg.size(); ++i)
        mbar[i] = avg.objective[i] - (hpf ? e * *avg.states[i].h : 0.0);

    ClosenessReport report;
    report.omegas = omegas;
    for (double w : omegas) {
        EscVsParams pw = params;
        pw.omega = w;
        const double dt = (2.0 * std::numbers::pi / w) / 200.0;
        const Trajectory full = simulate(plant, pw, x0, t_final, dt, 1);
        double sup = 0.0;
        for (std::size_t s = 0; s < full.size(); ++s) {
            const double t = full.times[s];
            const double pos = t / dt_avg;
            const auto i0 = std::min(static_cast<std::size_t>(pos), avg.size() - 2);
            const double w1 = std::clamp(pos - static_cast<double>(i0), 0.0, 1.0);
            const double sinwt = std::sin(w * t);
            const SimState& a0 = avg.states[i0];
            const SimState& a1 = avg.states[i0 + 1];
            const SimState& f = full.states[s];
            for (std::size_t i = 0; i < n; ++i) {
                const double vbar = (1.0 - w1) * a0.qdot[i] + w1 * a1.qdot[i];
                sup = std::max(sup, std::abs(f.qdot[i] - (vbar + params.a[i] * sinwt)));
            }
            for (std::size_t i = 0; i < m; ++i) {
                const double kbar = (1.0 - w1) * a0.kin[i] + w1 * a1.kin[i];
                sup = std::max(sup, std::abs(f.kin[i] - kbar));
            }
            const double ubar = (1.0 - w1) * a0.u_hat + w1 * a1.u_hat;
            const double mb = (1.0 - w1) * mbar[i0] + w1 * mbar[i0 + 1];
            sup = std::max(sup, std::abs(f.u_hat - (ubar + params.k * mb * sinwt)));
        }
        report.sup_errors.push_back(sup);
    }
    for (std::size_t i = 0; i + 1 < report.sup_errors.size(); ++i)
        report.decay_ratios.push_back(report.sup_errors[i + 1] / report.sup_errors[i]);
    return report;
}

LyapunovReport lyapunov_check(const AveragedSystem& sys, const SimState& x0, double t_final) {
    sys.validate();
    if (!(t_final > 0.0)) throw ValidationError("t_final must be positive");
    const Plant& plant = *sys.plant;
    const std::size_t n = plant.vel_dim();
    const std::size_t m = plant.kin_dim();
    if (x0.qdot.size() != n || x0.kin.size() != m)
        throw ValidationError("initial state does not match the plant");
    if (sys.hpf_gain.has_value() != x0.h.has_value())
        throw ValidationError("filter state h must be present exactly when hpf_gain is set");

    double cmin = 0.0;
    for (double ci : sys.c) {
        const double mag = std::abs(ci);
        if (mag > 0.0 && (cmin == 0.0 || mag < cmin)) cmin = mag;
    }
    const double cap = 0.05 * t_final;
    const double window = (cmin > 0.0) ? std::min(1.0 / cmin, cap) : cap;

    const bool hpf = sys.hpf_gain.has_value();
    const std::size_t dim = n + m + 1 + (hpf ? 1 : 0);
    Vec x(dim);
    for (std::size_t i = 0; i < n; ++i) x[i] = x0.qdot[i];
    for (std::size_t i = 0; i < m; ++i) x[n + i] = x0.kin[i];
    x[n + m] = x0.u_hat;
    if (hpf) x[n + m + 1] = *x0.h;
    plant.normalize_kin(x.data() + n);

    const double dt = kLyapunovDt;
    const auto steps = static_cast<std::size_t>(std::llround(t_final / dt));

    AveragedRhs rhs(sys);
    detail::Rk4Workspace work(dim);
    LyapunovReport rep;
    rep.window_s = window;
    rep.max_increase = 0.0;
    rep.worst_t = 0.0;
    double v_prev = plant.objective(x.data() + n);
    for (std::size_t step = 0; step < steps; ++step) {
        const double t = static_cast<double>(step) * dt;
        detail::rk4_step_inplace(rhs, x, t, dt, work);
        plant.normalize_kin(x.data() + n);
        const double v = plant.objective(x.data() + n);
        if (t + dt > window) {
            const double rise = v - v_prev;
            if (rise > rep.max_increase) {
                rep.max_increase = rise;
                rep.worst_t = t + dt;
            }
        }
        v_prev = v;
    }
    rep.monotone = rep.max_increase <= kLyapunovStepTol;
    return rep;
}

} // namespace escvs
