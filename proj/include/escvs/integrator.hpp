#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>

#include "escvs/errors.hpp"
#include "escvs/vec.hpp"

namespace escvs {

// Vector field x' = rhs(x, t); writes the derivative into dxdt (pre-sized).
using Rhs = std::function<void(const Vec& x, double t, Vec& dxdt)>;

// One classical RK4 step. Throws IntegrationDivergedError when a stage
// derivative or the updated state goes non-finite.
Vec rk4_step(const Rhs& rhs, const Vec& state, double t, double dt);

namespace detail {

struct Rk4Workspace {
    Vec k1, k2, k3, k4, xs;

    explicit Rk4Workspace(std::size_t dim)
        : k1(dim), k2(dim), k3(dim), k4(dim), xs(dim) {}
};

inline void check_finite(const Vec& v, double t) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) throw IntegrationDivergedError(t, i);
    }
}

// In-place RK4 core. F: void(const Vec& x, double t, Vec& dxdt).
// Kept as a template so hot loops avoid std::function dispatch.
template <class F>
void rk4_step_inplace(F&& rhs, Vec& x, double t, double dt, Rk4Workspace& w) {
    const std::size_t dim = x.size();
    const double half = 0.5 * dt;

    rhs(x, t, w.k1);
    check_finite(w.k1, t);
    for (std::size_t i = 0; i < dim; ++i) w.xs[i] = x[i] + half * w.k1[i];

    rhs(w.xs, t + half, w.k2);
    check_finite(w.k2, t + half);
    for (std::size_t i = 0; i < dim; ++i) w.xs[i] = x[i] + half * w.k2[i];

    rhs(w.xs, t + half, w.k3);
    check_finite(w.k3, t + half);
    for (std::size_t i = 0; i < dim; ++i) w.xs[i] = x[i] + dt * w.k3[i];

    rhs(w.xs, t + dt, w.k4);
    check_finite(w.k4, t + dt);

    const double sixth = dt / 6.0;
    for (std::size_t i = 0; i < dim; ++i) {
        x[i] += sixth * (w.k1[i] + 2.0 * (w.k2[i] + w.k3[i]) + w.k4[i]);
        if (!std::isfinite(x[i])) throw IntegrationDivergedError(t + dt, i);
    }
}

} // namespace detail

} // namespace escvs
