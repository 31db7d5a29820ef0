#include <cmath>
#include <random>

#include "doctest.h"
#include "tsclab/devices/ibr.hpp"
#include "tsclab/devices/sm.hpp"
#include "tsclab/numerics/linalg.hpp"
#include "tsclab/ph/ph.hpp"

using namespace tsclab;
using namespace tsclab::devices;
using numerics::Vector;

namespace {

struct Evaluated {
    Vector f, g;
    Complex current;
};

Evaluated eval(const Device& d, const Vector& x, const Vector& y, Complex v) {
    Evaluated e{Vector(d.n_states()), Vector(d.n_algebraic()), {}};
    e.current = d.evaluate(x, y, v, e.f, e.g);
    return e;
}

double max_abs(const Vector& v) {
    double m = 0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
}

struct Initialized {
    IbrDevice dev;
    Vector x, y;
    Complex v;
};

Initialized initialized(int study_case, Complex v = std::polar(1.02, 0.1), Complex s = {0.8, 0.25}) {
    IbrDevice dev("IBR", "1", IbrConfig::for_case(study_case), IbrParams{});
    Vector x(dev.n_states()), y(dev.n_algebraic());
    dev.initialize(v, s, x, y);
    return {dev, x, y, v};
}

}  // namespace

TEST_SUITE("current limiter") {
    TEST_CASE("below, on and above the limit") {
        CHECK(current_limit_rho(0.5, 0.5, 1.5) == 1.0);
        CHECK(current_limit_rho(3.0, 4.0, 1.5) == doctest::Approx(0.3).epsilon(1e-15));
        CHECK(current_limit_rho(1.5, 0.0, 1.5) == 1.0);
        CHECK(current_limit_rho(0.0, 0.0, 1.5) == 1.0);
    }

    TEST_CASE("limited magnitude never exceeds the rating") {
        std::mt19937_64 rng(13);
        std::uniform_real_distribution<double> u(-10, 10), m(0.1, 3);
        for (int k = 0; k < 10000; ++k) {
            const double a = u(rng), b = u(rng), lim = m(rng);
            const double rho = current_limit_rho(a, b, lim);
            CHECK(rho > 0.0);
            CHECK(rho <= 1.0);
            CHECK(rho * std::hypot(a, b) <= lim * (1 + 1e-12));
        }
    }

    TEST_CASE("non-positive rating is rejected") { CHECK_THROWS(current_limit_rho(1, 1, 0)); }
}

TEST_SUITE("converter physical layer") {
    TEST_CASE("filter steady state with the table values") {
        const IbrParams p;
        CHECK(p.r_f == 0.001);
        CHECK(p.l_f == 0.0031);
        PhysicalInputs in;
        in.v_td = 1.001;
        in.v_tq = 0.0;
        in.omega = 1.0;
        const PhysicalState d = physical_rhs(p, {1.0, 1.0, 0.0, 1.0, 0.0}, in);
        CHECK(std::abs(d[1] * p.l_f) < 1e-15);  // -R_f i_d + (v_td - v_d) = -0.001 + 0.001
    }

    TEST_CASE("difference Jacobian entry of the d-axis current") {
        const IbrParams p;
        PhysicalInputs in;
        in.v_td = 0.9;
        in.v_tq = 0.1;
        in.i_dc = 0.8;
        const numerics::DenseMatrix j = numerics::fd_jacobian(
            [&](std::span<const double> s, std::span<double> out) {
                const PhysicalState d = physical_rhs(p, {s[0], s[1], s[2], s[3], s[4]}, in);
                std::copy(d.begin(), d.end(), out.begin());
            },
            Vector{1.0, 0.7, -0.2, 1.0, 0.05}, 5);
        CHECK(j(1, 1) == doctest::Approx(-p.r_f / p.l_f).epsilon(1e-8));
    }

    TEST_CASE("converter power identity") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(-1, 1);
        for (int c : {1, 2, 3, 4, 5, 6}) {
            auto init = initialized(c);
            for (int k = 0; k < 50; ++k) {
                Vector x = init.x;
                for (double& e : x) e += 0.05 * u(rng);
                const IbrSignals s = init.dev.signals(x, init.y);
                // dc-side draw equals ac-side converter power
                const PhysicalState d = physical_rhs(init.dev.params(), s.storage, s.inputs);
                const double lhs = (s.inputs.i_dc - init.dev.params().c_dc * d[0]) * s.storage[0];
                const double rhs = s.inputs.v_td * s.storage[1] + s.inputs.v_tq * s.storage[2];
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("all control schemes share one physical layer bit for bit") {
        std::mt19937_64 rng(29);
        std::uniform_real_distribution<double> u(-1, 1);
        for (int c : {1, 2, 3, 4, 5, 6}) {
            auto init = initialized(c);
            for (int k = 0; k < 200; ++k) {
                Vector x = init.x, y = init.y;
                for (double& e : x) e += 0.2 * u(rng);
                for (double& e : y) e += 0.2 * u(rng);
                const auto ev = eval(init.dev, x, y, init.v * Complex(1 + 0.1 * u(rng), 0.1 * u(rng)));
                const IbrSignals s = init.dev.signals(x, y);
                const PhysicalState ref = physical_rhs(init.dev.params(), s.storage, s.inputs);
                const auto& lay = init.dev.layout();
                const int idx[5] = {lay.v_dc, lay.i_d, lay.i_q, lay.v_d, lay.v_q};
                for (int i = 0; i < 5; ++i) CHECK(ev.f[static_cast<std::size_t>(idx[i])] == ref[static_cast<std::size_t>(i)]);
            }
        }
    }
}

TEST_SUITE("converter initialization") {
    TEST_CASE("every wiring starts at an equilibrium") {
        for (int c : {1, 2, 3, 4, 5, 6}) {
            CAPTURE(c);
            auto init = initialized(c);
            const auto ev = eval(init.dev, init.x, init.y, init.v);
            CHECK(max_abs(ev.f) < 1e-9);
            CHECK(max_abs(ev.g) < 1e-9);
            // Delivers the requested injection.
            const Complex s = init.v * std::conj(ev.current);
            CHECK(std::abs(s - Complex(0.8, 0.25)) < 1e-9);
        }
    }

    TEST_CASE("inertia-free synchronous machine emulation has an algebraic frequency") {
        IbrParams p;
        p.m_vsm = 0.0;
        IbrDevice dev("IBR", "1", IbrConfig::for_case(6), p);
        CHECK(dev.n_algebraic() == 3);
        Vector x(dev.n_states()), y(dev.n_algebraic());
        const Complex v = std::polar(1.0, -0.2);
        dev.initialize(v, {0.5, 0.1}, x, y);
        const auto ev = eval(dev, x, y, v);
        CHECK(max_abs(ev.f) < 1e-9);
        CHECK(max_abs(ev.g) < 1e-9);
    }

    TEST_CASE("phase-locked loop aligns with the capacitor voltage") {
        for (int c : {1, 2, 3}) {
            auto init = initialized(c);
            const auto& lay = init.dev.layout();
            CHECK(std::abs(init.x[static_cast<std::size_t>(lay.v_q)]) < 1e-12);
            CHECK(init.x[static_cast<std::size_t>(lay.v_d)] == doctest::Approx(std::abs(init.v)).epsilon(1e-12));
            CHECK(std::abs(init.dev.signals(init.x, init.y).frame_angle - std::arg(init.v)) < 1e-12);
            CHECK(std::abs(init.dev.signals(init.x, init.y).omega - 1.0) < 1e-12);
        }
    }

    TEST_CASE("dc power balance at the operating point") {
        for (int c : {1, 2, 3, 4, 5, 6}) {
            auto init = initialized(c);
            const IbrSignals s = init.dev.signals(init.x, init.y);
            const auto [v_dc, i_d, i_q, v_d, v_q] = s.storage;
            const double lhs = s.inputs.i_dc * v_dc;
            const double rhs = v_d * i_d + v_q * i_q + init.dev.params().r_f * (i_d * i_d + i_q * i_q);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        }
    }

    TEST_CASE("power in the converter frame equals power in the network frame") {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> u(-1, 1);
        for (int c : {1, 3, 5, 6}) {
            auto init = initialized(c);
            for (int k = 0; k < 100; ++k) {
                Vector x = init.x, y = init.y;
                for (double& e : x) e += 0.1 * u(rng);
                for (double& e : y) e += 0.1 * u(rng);
                const IbrSignals s = init.dev.signals(x, y);
                const auto& lay = init.dev.layout();
                const Complex v_cap = Complex(x[static_cast<std::size_t>(lay.v_d)], x[static_cast<std::size_t>(lay.v_q)]) *
                                      std::polar(1.0, s.frame_angle);
                const Complex s_net = v_cap * std::conj(Complex(y[0], y[1]));
                CHECK(std::abs(s.p - s_net.real()) < 1e-12);
                CHECK(std::abs(s.q - s_net.imag()) < 1e-12);
            }
        }
    }

    TEST_CASE("droop grid-forming at its setpoint holds the angle") {
        auto init = initialized(5);
        const auto& lay = init.dev.layout();
        const auto ev = eval(init.dev, init.x, init.y, init.v);
        CHECK(std::abs(init.x[static_cast<std::size_t>(lay.gamma_p)]) < 1e-12);
        CHECK(std::abs(ev.f[static_cast<std::size_t>(lay.delta)]) < 1e-12);
        CHECK(std::abs(ev.f[static_cast<std::size_t>(lay.gamma_p)]) < 1e-12);
    }

    TEST_CASE("parameter access by name") {
        IbrDevice dev("IBR", "1", IbrConfig::for_case(5), IbrParams{});
        CHECK(dev.parameter("c_dc") == doctest::Approx(0.1));
        CHECK(dev.set_parameter("i_max", 1.415));
        CHECK(dev.parameter("i_max") == doctest::Approx(1.415));
        CHECK_FALSE(dev.set_parameter("no_such_thing", 1.0));
        IbrParams bad;
        bad.c_dc = -1;
        CHECK_THROWS(IbrDevice("IBR", "1", IbrConfig::for_case(5), bad));
    }

    TEST_CASE("unknown case wiring is rejected") { CHECK_THROWS(IbrConfig::for_case(7)); }
}

TEST_SUITE("synchronous machine") {
    TEST_CASE("unloaded equilibrium") {
        SynchronousMachine sm("G", "1", SmParams{});
        sm.set_operating_point(1.0, 0.0);
        const Complex v = std::polar(1.0, 0.3);
        const auto ev = eval(sm, Vector{0.3, 1.0}, Vector{}, v);
        CHECK(max_abs(ev.f) < 1e-15);
    }

    TEST_CASE("electrical power follows the angle law") {
        SmParams p;
        SynchronousMachine sm("G", "1", p);
        sm.set_operating_point(1.2, 0.0);
        const Complex v = std::polar(0.98, 0.1);
        for (double d : {-0.5, 0.0, 0.4, 1.2})
            CHECK(sm.electrical_power(d, v) == doctest::Approx(0.98 * 1.2 / p.x_s * std::sin(d - 0.1)).epsilon(1e-12));
    }

    TEST_CASE("initialization delivers the dispatch") {
        SynchronousMachine sm("G", "1", SmParams{});
        Vector x(2), y;
        const Complex v = std::polar(1.01, 0.05);
        sm.initialize(v, {0.7, 0.2}, x, y);
        const auto ev = eval(sm, x, y, v);
        CHECK(max_abs(ev.f) < 1e-9);
        CHECK(std::abs(v * std::conj(ev.current) - Complex(0.7, 0.2)) < 1e-9);
    }
}
