#include "escvs/integrator.hpp"

namespace escvs {

Vec rk4_step(const Rhs& rhs, const Vec& state, double t, double dt) {
    if (!(dt > 0.0)) throw ValidationError("rk4_step requires dt > 0");
    detail::Rk4Workspace w(state.size());
    Vec x = state;
    detail::rk4_step_inplace(rhs, x, t, dt, w);
    return x;
}

} // namespace escvs
