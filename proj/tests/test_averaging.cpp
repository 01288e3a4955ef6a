#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <random>

#include "escvs/averaging.hpp"
#include "escvs/errors.hpp"
#include "escvs/plants.hpp"
#include "escvs/scenario.hpp"

using namespace escvs;

namespace {

PlantModel<RigidBodyModel> table1_rigid_body() {
    RigidBodyParams p;
    p.inertia = {1.0, 2.0, 3.0};
    return PlantModel<RigidBodyModel>{RigidBodyModel{p, {0.0, 0.0, 0.0, 1.0}}};
}

PlantModel<UnicycleModel> table3_plant() {
    UnicycleParams p;
    p.d_v = 0.2;
    p.d_omega = 0.1;
    p.target = {1.0, 1.0};
    return PlantModel<UnicycleModel>{UnicycleModel{p}};
}

PlantModel<QuadcopterModel> table2_plant() {
    QuadcopterParams p;
    p.inertia = {0.0075, 0.0075, 0.013};
    p.rot_drag = {0.1, 0.1, 0.15};
    p.euler_desired = {0.0, 0.0, 0.0};
    return PlantModel<QuadcopterModel>{QuadcopterModel{p}};
}

} // namespace

TEST_CASE("m22 of a velocity-linear drift is identically zero") {
    const auto plant = table3_plant();
    const Mat M = m22(plant, {2.0, 2.0, 0.0}, {0.0, 3.0}, {1e-4, 1e-2});
    REQUIRE(M.size() == 2);
    for (const auto& row : M)
        for (double x : row) CHECK(std::abs(x) < 1e-9);
}

TEST_CASE("m22 of the rigid body matches the hand-expanded Hessian contraction") {
    // f0 = -w2 w3, f1 = w1 w3, f2 = -w1 w2 / 3 for I = diag(1,2,3), and the
    // translational block is -(w x v). Contracting the constant Hessians with
    // a = (1,1,1,0,0,0) gives the matrix below, independent of the evaluation
    // point.
    const auto plant = table1_rigid_body();
    const Vec qdot{0.3, -0.2, 0.5, 0.1, 0.7, -0.4};
    const Vec a{1.0, 1.0, 1.0, 0.0, 0.0, 0.0};
    const Mat M = m22(plant, {0.0, 0.0, 0.0, 1.0}, qdot, a);
    const double third = 1.0 / 3.0;
    const double expect[6][6] = {
        {0.0, -1.0, -1.0, 0.0, 0.0, 0.0},
        {1.0, 0.0, 1.0, 0.0, 0.0, 0.0},
        {-third, -third, 0.0, 0.0, 0.0, 0.0},
        {0.0, 0.0, 0.0, 0.0, 1.0, -1.0},
        {0.0, 0.0, 0.0, -1.0, 0.0, 1.0},
        {0.0, 0.0, 0.0, 1.0, -1.0, 0.0},
    };
    REQUIRE(M.size() == 6);
    for (int i = 0; i < 6; ++i) {
        REQUIRE(M[i].size() == 6);
        for (int k = 0; k < 6; ++k) CHECK(std::abs(M[i][k] - expect[i][k]) < 1e-9);
    }
}

TEST_CASE("m22 is linear in the dither direction") {
    const auto plant = table1_rigid_body();
    const Vec qdot{0.3, -0.2, 0.5, 0.1, 0.7, -0.4};
    const Mat M = m22(plant, {0.0, 0.0, 0.0, 1.0}, qdot, {2.0, 0.0, 0.0, 0.0, 0.0, 0.0});
    // Only f1 and f2 have second derivatives that pair channel 0 with others.
    CHECK(std::abs(M[1][2] - 2.0) < 1e-9);
    CHECK(std::abs(M[2][1] + 2.0 / 3.0) < 1e-9);
    CHECK(std::abs(M[0][1]) < 1e-9);
    CHECK(std::abs(M[0][2]) < 1e-9);
}

TEST_CASE("m22 is insensitive to the finite-difference step") {
    const auto plant = table1_rigid_body();
    const Vec kin{0.0, 0.0, 0.0, 1.0};
    const Vec qdot{0.9, -1.1, 0.4, 0.2, -0.3, 0.6};
    const Vec a{0.7, -0.4, 1.2, 0.5, -0.8, 0.3};
    const Mat coarse = m22(plant, kin, qdot, a, 1e-4);
    const Mat fine = m22(plant, kin, qdot, a, 1e-6);
    for (std::size_t i = 0; i < coarse.size(); ++i)
        for (std::size_t k = 0; k < coarse[i].size(); ++k) {
            const double scale = std::max(1.0, std::abs(fine[i][k]));
            CHECK(std::abs(coarse[i][k] - fine[i][k]) / scale < 1e-6);
        }
}

TEST_CASE("objective gradient oracles") {
    SUBCASE("unicycle") {
        const auto plant = table3_plant();
        const Vec g = grad_objective(plant, {2.0, 2.0, 0.4});
        REQUIRE(g.size() == 2);
        CHECK(std::abs(g[0] - 2.0) < 1e-8);
        CHECK(std::abs(g[1] - 2.0) < 1e-8);
        const Vec g0 = grad_objective(plant, {1.0, 1.0, -0.7});
        CHECK(std::abs(g0[0]) < 1e-8);
        CHECK(std::abs(g0[1]) < 1e-8);
    }
    SUBCASE("quadcopter") {
        const auto plant = table2_plant();
        const Vec g = grad_objective(plant, {0.1, 0.0, 0.0});
        REQUIRE(g.size() == 3);
        CHECK(std::abs(g[0] - 0.2) < 1e-8);
        CHECK(std::abs(g[1]) < 1e-8);
        CHECK(std::abs(g[2]) < 1e-8);
    }
    SUBCASE("satellite against the analytic error-quaternion gradient") {
        const Scenario s = load_preset("satellite-table1");
        const auto plant = make_plant(s);
        Vec q{0.57, 0.57, 0.57, 0.159};
        plant->normalize_kin(q.data());
        const Vec g = grad_objective(*plant, q);
        REQUIRE(g.size() == 4);
        // Identity target: J = q1^2 + q2^2 + q3^2, so dJ/dq = 2(q1,q2,q3,0).
        for (int i = 0; i < 3; ++i) CHECK(std::abs(g[i] - 2.0 * q[i]) < 1e-7);
        CHECK(std::abs(g[3]) < 1e-7);
    }
}

TEST_CASE("pushforward gradient matches the analytic chain rule") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-1.2, 1.2);

    SUBCASE("unicycle") {
        const auto plant = table3_plant();
        for (int trial = 0; trial < 100; ++trial) {
            const Vec pose{u(rng), u(rng), u(rng)};
            const Vec g = pushforward_grad(plant, pose);
            const double gx = 2.0 * (pose[0] - 1.0);
            const double gy = 2.0 * (pose[1] - 1.0);
            CHECK(std::abs(g[0] - (gx * std::cos(pose[2]) + gy * std::sin(pose[2]))) < 1e-7);
            CHECK(std::abs(g[1]) < 1e-7); // heading does not enter J
        }
    }
    SUBCASE("quadcopter") {
        const auto plant = table2_plant();
        for (int trial = 0; trial < 100; ++trial) {
            const Vec eta{u(rng), u(rng), u(rng)};
            const Vec g = pushforward_grad(plant, eta);
            for (int i = 0; i < 3; ++i) {
                Vec e(3, 0.0);
                e[static_cast<std::size_t>(i)] = 1.0;
                const Vec rate = euler_kinematics(eta, e);
                double want = 0.0;
                for (int j = 0; j < 3; ++j) want += 2.0 * eta[j] * rate[j];
                CHECK(std::abs(g[static_cast<std::size_t>(i)] - want) < 1e-7);
            }
        }
    }
    SUBCASE("satellite wheel channels sense nothing") {
        const Scenario s = load_preset("satellite-table1");
        const auto plant = make_plant(s);
        Vec q{0.3, -0.4, 0.5, 0.7};
        plant->normalize_kin(q.data());
        const Vec g = pushforward_grad(*plant, q);
        REQUIRE(g.size() == 6);
        for (int i = 0; i < 3; ++i) {
            Vec e(6, 0.0);
            e[static_cast<std::size_t>(i)] = 1.0;
            const Vec rate = quaternion_kinematics(q, {e[0], e[1], e[2]});
            double want = 0.0;
            for (int j = 0; j < 3; ++j) want += 2.0 * q[j] * rate[j];
            CHECK(std::abs(g[static_cast<std::size_t>(i)] - want) < 1e-7);
        }
        CHECK(g[3] == 0.0);
        CHECK(g[4] == 0.0);
        CHECK(g[5] == 0.0);
    }
}

TEST_CASE("averaged rhs assembles drift, feedback, curvature and descent terms") {
    const Scenario s = load_preset("unicycle-table3");
    const auto plant = make_plant(s);
    const AveragedSystem sys = make_averaged(*plant, runtime_controller(s));

    const Vec state{0.1, -0.2, 1.5, 0.8, 0.3, 0.05, 0.4};
    const Vec d = averaged_rhs(sys, state, 0.0);
    REQUIRE(d.size() == 7);

    // Velocity rows: drift + c u_bar, the curvature term vanishes here.
    CHECK(std::abs(d[0] - (-0.2 * 0.1 + 1.0 * 0.05)) < 1e-9);
    CHECK(std::abs(d[1] - (-0.1 * -0.2 + 6.0 * 0.05)) < 1e-9);
    // Kinematics evaluated at the current pose and velocity.
    const Vec kin = unicycle_kinematics({1.5, 0.8, 0.3}, 0.1, -0.2);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(d[2 + i] - kin[static_cast<std::size_t>(i)]) < 1e-12);
    // Descent channel: -k/2 grad J . a through the kinematic map.
    const Vec g = pushforward_grad(*plant, {1.5, 0.8, 0.3});
    const double want_u = -0.5 * 5.0 * (g[0] * 1e-4 + g[1] * 1e-2);
    CHECK(std::abs(d[5] - want_u) < 1e-9);
    // Washout row.
    const double J = plant->objective(state.data() + 2);
    CHECK(std::abs(d[6] - (-1.0 * 0.4 + J)) < 1e-12);
}

TEST_CASE("averaged rhs is autonomous") {
    const Scenario s = load_preset("unicycle-table3");
    const auto plant = make_plant(s);
    const AveragedSystem sys = make_averaged(*plant, runtime_controller(s));
    const Vec state{0.1, -0.2, 1.5, 0.8, 0.3, 0.05, 0.4};
    const Vec d0 = averaged_rhs(sys, state, 0.0);
    const Vec d1 = averaged_rhs(sys, state, 123.456);
    REQUIRE(d0.size() == d1.size());
    for (std::size_t i = 0; i < d0.size(); ++i) CHECK(d0[i] == d1[i]);
}

TEST_CASE("averaged rhs at rest reduces to the quarter curvature term") {
    const Scenario s = load_preset("satellite-table1");
    const auto plant = make_plant(s);
    const EscVsParams p = runtime_controller(s);
    const AveragedSystem sys = make_averaged(*plant, p);

    Vec q{0.57, 0.57, 0.57, 0.159};
    plant->normalize_kin(q.data());
    Vec state(6 + 4 + 2, 0.0);
    for (int i = 0; i < 4; ++i) state[6 + i] = q[static_cast<std::size_t>(i)];
    const Vec d = averaged_rhs(sys, state, 0.0);

    const Mat M = m22(*plant, q, Vec(6, 0.0), p.a);
    for (int i = 0; i < 6; ++i) {
        double want = 0.0;
        for (int k = 0; k < 6; ++k) want += M[i][k] * p.a[static_cast<std::size_t>(k)];
        CHECK(std::abs(d[static_cast<std::size_t>(i)] - 0.25 * want) < 1e-8);
    }
}

TEST_CASE("averaged system is stationary at the sought extremum") {
    const Scenario s = load_preset("unicycle-table3");
    const auto plant = make_plant(s);
    const AveragedSystem sys = make_averaged(*plant, runtime_controller(s));
    const Vec state{0.0, 0.0, 1.0, 1.0, 0.2, 0.0, 0.0};
    const Vec d = averaged_rhs(sys, state, 0.0);
    for (double x : d) CHECK(std::abs(x) < 1e-12);
}

TEST_CASE("averaged state layout is validated") {
    const Scenario s = load_preset("unicycle-table3");
    const auto plant = make_plant(s);
    const AveragedSystem sys = make_averaged(*plant, runtime_controller(s));
    CHECK_THROWS_AS(averaged_rhs(sys, Vec(6, 0.0), 0.0), ValidationError);

    AveragedSystem broken = sys;
    broken.plant = nullptr;
    CHECK_THROWS_AS(broken.validate(), ValidationError);
}

TEST_CASE("simulate_averaged mirrors the recording contract") {
    const Scenario s = load_preset("unicycle-table3");
    const auto plant = make_plant(s);
    const AveragedSystem sys = make_averaged(*plant, runtime_controller(s));
    const Trajectory traj = simulate_averaged(sys, s.x0, 2.0, 1e-3, 10);
    REQUIRE(traj.size() >= 2);
    CHECK(traj.dt == doctest::Approx(1e-2).epsilon(1e-12));
    CHECK(traj.times.back() >= 2.0 - 1e-9);
    for (const auto& st : traj.states) {
        CHECK(st.qdot.size() == 2);
        CHECK(st.kin.size() == 3);
        CHECK(st.h.has_value());
    }
    // Deterministic.
    const Trajectory again = simulate_averaged(sys, s.x0, 2.0, 1e-3, 10);
    CHECK(again.objective.back() == traj.objective.back());
}

TEST_CASE("closeness sweep validates its frequency grid") {
    const Scenario s = load_preset("unicycle-table3");
    const auto plant = make_plant(s);
    const EscVsParams p = runtime_controller(s);
    CHECK_THROWS_AS(closeness_sweep(*plant, p, s.x0, 1.0, {20.0, 40.0}), ValidationError);
    CHECK_THROWS_AS(closeness_sweep(*plant, p, s.x0, 1.0, {20.0, 20.0, 40.0}), ValidationError);
    CHECK_THROWS_AS(closeness_sweep(*plant, p, s.x0, 1.0, {40.0, 20.0, 80.0}), ValidationError);
    CHECK_THROWS_AS(closeness_sweep(*plant, p, s.x0, 1.0, {-20.0, 20.0, 40.0}), ValidationError);
}

TEST_CASE("a motionless loop and its average coincide exactly") {
    UnicycleParams up;
    up.d_v = 0.0;
    up.d_omega = 0.0;
    up.target = {0.0, 0.0};
    const PlantModel<UnicycleModel> plant{UnicycleModel{up}};
    EscVsParams p;
    p.a = {0.0, 0.0};
    p.c = {1.0, 1.0};
    p.k = 0.0;
    p.omega = 20.0;
    SimState x0;
    x0.qdot = {0.0, 0.0};
    x0.kin = {5.0, 5.0, 0.0};
    const ClosenessReport rep = closeness_sweep(plant, p, x0, 1.0, {20.0, 40.0, 80.0});
    REQUIRE(rep.sup_errors.size() == 3);
    for (double e : rep.sup_errors) CHECK(e == 0.0);
}

TEST_CASE("deviation from the average shrinks as omega grows") {
    const Scenario s = load_preset("unicycle-table3");
    const auto plant = make_plant(s);
    const ClosenessReport rep =
        closeness_sweep(*plant, runtime_controller(s), s.x0, 1.0, {20.0, 40.0, 80.0});
    REQUIRE(rep.sup_errors.size() == 3);
    CHECK(rep.sup_errors[0] > rep.sup_errors[1]);
    CHECK(rep.sup_errors[1] > rep.sup_errors[2]);
    REQUIRE(rep.decay_ratios.size() == 2);
    for (double r : rep.decay_ratios) {
        CHECK(r > 0.0);
        CHECK(r < 1.0);
    }
}

TEST_CASE("lyapunov check is exact on a system parked at the extremum") {
    UnicycleParams up;
    up.d_v = 0.2;
    up.d_omega = 0.1;
    up.target = {1.0, 1.0};
    const PlantModel<UnicycleModel> plant{UnicycleModel{up}};
    EscVsParams p;
    p.a = {1e-4, 1e-2};
    p.c = {1.0, 6.0};
    p.k = 5.0;
    p.omega = 20.0;
    AveragedSystem sys = make_averaged(plant, p);
    SimState x0;
    x0.qdot = {0.0, 0.0};
    x0.kin = {1.0, 1.0, 0.0};
    const LyapunovReport rep = lyapunov_check(sys, x0, 10.0);
    CHECK(rep.monotone);
    CHECK(rep.max_increase == 0.0);
    // Window: 1 / min nonzero |c| = 1 s, capped at 5% of t_final = 0.5 s.
    CHECK(rep.window_s == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("lyapunov window uses one averaged time constant when it fits") {
    const Scenario s = load_preset("unicycle-table3");
    const auto plant = make_plant(s);
    const AveragedSystem sys = make_averaged(*plant, runtime_controller(s));
    const LyapunovReport rep = lyapunov_check(sys, s.x0, 40.0);
    CHECK(rep.window_s == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.max_increase >= 0.0);
    CHECK(rep.worst_t <= 40.0 + 1e-9);
}
