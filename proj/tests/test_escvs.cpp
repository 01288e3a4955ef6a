#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "escvs/controller.hpp"
#include "escvs/errors.hpp"
#include "escvs/scenario.hpp"

using namespace escvs;

namespace {

EscVsParams table3_gains() {
    EscVsParams p;
    p.a = {1e-4, 1e-2};
    p.c = {1.0, 6.0};
    p.k = 5.0;
    p.omega = 20.0;
    return p;
}

bool mentions(const std::exception& ex, const char* word) {
    return std::string(ex.what()).find(word) != std::string::npos;
}

} // namespace

TEST_CASE("control input at t=0 with idle adaptation is a*omega") {
    const Vec u = control_input(table3_gains(), 0.0, 0.0);
    REQUIRE(u.size() == 2);
    CHECK(u[0] == doctest::Approx(2e-3).epsilon(1e-14));
    CHECK(u[1] == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("control input with zero dither amplitude is pure feedback") {
    EscVsParams p = table3_gains();
    p.a = {0.0, 0.0};
    const Vec u = control_input(p, 0.5, 123.456);
    CHECK(u[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(u[1] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("adaptation oracle k J omega cos(omega t)") {
    const EscVsParams p = table3_gains();
    CHECK(adapt(p, 2.0, 0.0) == doctest::Approx(200.0).epsilon(1e-14));
    CHECK(adapt(p, 0.0, 0.37) == 0.0);
    // Quarter period: cos vanishes.
    CHECK(std::abs(adapt(p, 2.0, std::numbers::pi / 40.0)) < 1e-10);
}

TEST_CASE("adaptation is linear in k") {
    EscVsParams p = table3_gains();
    const double r1 = adapt(p, 1.7, 0.3);
    p.k *= 2.0;
    CHECK(adapt(p, 1.7, 0.3) == 2.0 * r1);
}

TEST_CASE("washout variant oracles") {
    EscVsParams p = table3_gains();
    p.hpf_gain = 1.0;
    const HpfRates r = adapt_hpf(p, 1.0, 0.0, 0.0);
    CHECK(r.u_hat_dot == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(r.h_dot == doctest::Approx(1.0).epsilon(1e-14));

    EscVsParams sat;
    sat.a = {1.0, 1.0, 1.0};
    sat.c = {2.0, 2.0, 2.0};
    sat.k = 4.84375;
    sat.omega = 30.0;
    sat.hpf_gain = 2.26;
    const HpfRates r2 = adapt_hpf(sat, 0.1, 0.0, 0.0);
    CHECK(r2.u_hat_dot == doctest::Approx(14.53125).epsilon(1e-14));
    CHECK(r2.h_dot == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("washout filter at its equilibrium produces zero rates") {
    EscVsParams p = table3_gains();
    p.hpf_gain = 2.0;
    const double J = 0.8;
    const HpfRates r = adapt_hpf(p, J, J / 2.0, 0.0);
    CHECK(std::abs(r.u_hat_dot) < 1e-14);
    CHECK(std::abs(r.h_dot) < 1e-14);
}

TEST_CASE("washout variant requires the filter gain") {
    CHECK_THROWS_AS(adapt_hpf(table3_gains(), 1.0, 0.0, 0.0), ValidationError);
}

TEST_CASE("perturbation and adaptation integrate to zero over one period") {
    const EscVsParams p = table3_gains();
    const double period = 2.0 * std::numbers::pi / p.omega;
    const int n = 4000;
    const double h = period / n;
    Vec sum_u(p.a.size(), 0.0);
    double sum_adapt = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        const double t = i * h;
        const Vec u = control_input(p, 0.0, t);
        for (std::size_t j = 0; j < u.size(); ++j) sum_u[j] += w * u[j] * h;
        sum_adapt += w * adapt(p, 1.3, t) * h;
    }
    for (double s : sum_u) CHECK(std::abs(s) < 1e-10);
    CHECK(std::abs(sum_adapt) < 1e-10);
}

TEST_CASE("validate accepts the zero-adaptation boundary and signed gains") {
    EscVsParams p = table3_gains();
    p.k = 0.0;
    CHECK_NOTHROW(p.validate());
    // The satellite table uses negative dither and feedback gains.
    CHECK_NOTHROW(runtime_controller(load_preset("satellite-table1")).validate());
}

TEST_CASE("validate rejects inconsistent gains") {
    SUBCASE("size mismatch") {
        EscVsParams p = table3_gains();
        p.c.push_back(1.0);
        CHECK_THROWS_AS(p.validate(), ValidationError);
    }
    SUBCASE("empty") {
        EscVsParams p;
        p.omega = 20.0;
        CHECK_THROWS_AS(p.validate(), ValidationError);
    }
    SUBCASE("omega") {
        EscVsParams p = table3_gains();
        p.omega = 0.0;
        try {
            p.validate();
            FAIL("expected ValidationError");
        } catch (const ValidationError& ex) {
            CHECK(mentions(ex, "omega"));
        }
    }
    SUBCASE("negative k") {
        EscVsParams p = table3_gains();
        p.k = -1.0;
        try {
            p.validate();
            FAIL("expected ValidationError");
        } catch (const ValidationError& ex) {
            CHECK(mentions(ex, "k"));
        }
    }
    SUBCASE("non-finite entries") {
        EscVsParams p = table3_gains();
        p.a[1] = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(p.validate(), ValidationError);
    }
    SUBCASE("nonpositive filter gain") {
        EscVsParams p = table3_gains();
        p.hpf_gain = 0.0;
        CHECK_THROWS_AS(p.validate(), ValidationError);
        p.hpf_gain = -2.0;
        CHECK_THROWS_AS(p.validate(), ValidationError);
    }
}

TEST_CASE("gain-ordering warning flags channels where the dither dominates") {
    EscVsParams p = table3_gains();
    p.a = {2.0, 1e-2};
    p.c = {1.0, 6.0};
    const auto w = p.warnings();
    REQUIRE(w.size() == 1);
    CHECK(w[0].find("c[0]") != std::string::npos);
}

TEST_CASE("bundled presets carry no gain warnings") {
    for (const auto& name : preset_names())
        CHECK(runtime_controller(load_preset(name)).warnings().empty());
}
