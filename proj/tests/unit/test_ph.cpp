#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "tsclab/analysis/linearize.hpp"
#include "tsclab/devices/ibr.hpp"
#include "tsclab/devices/sm.hpp"
#include "tsclab/harness/scenario.hpp"
#include "tsclab/numerics/eigen.hpp"
#include "tsclab/ph/ph.hpp"

using namespace tsclab;
using namespace tsclab::devices;
using numerics::Vector;

namespace {

struct Point {
    std::unique_ptr<IbrDevice> dev;
    Vector x, y;
    Complex v;
};

Point operating_point(int study_case) {
    Point p;
    p.dev = std::make_unique<IbrDevice>("IBR", "1", IbrConfig::for_case(study_case), IbrParams{});
    p.x.assign(p.dev->n_states(), 0.0);
    p.y.assign(p.dev->n_algebraic(), 0.0);
    p.v = std::polar(1.01, 0.2);
    p.dev->initialize(p.v, {0.7, 0.2}, p.x, p.y);
    return p;
}

void perturb(std::mt19937_64& rng, Vector& v, double scale) {
    std::uniform_real_distribution<double> u(-1, 1);
    for (double& e : v) e += scale * u(rng);
}

}  // namespace

TEST_SUITE("stored energy") {
    TEST_CASE("charged dc link alone") {
        auto p = operating_point(1);
        std::fill(p.x.begin(), p.x.end(), 0.0);
        p.x[static_cast<std::size_t>(p.dev->layout().v_dc)] = 1.0;
        CHECK(ph::storage_energy(*p.dev, p.x, p.y, p.v) == doctest::Approx(0.05).epsilon(1e-14));
    }

    TEST_CASE("machine at synchronous speed") {
        SynchronousMachine sm("G", "1", SmParams{});
        const Vector x{0.4, 1.0};
        CHECK(ph::storage_energy(sm, x, {}, 1.0) == doctest::Approx(3.0).epsilon(1e-14));
        const Vector g = ph::storage_gradient(sm, x, {}, 1.0);
        REQUIRE(g.size() == 2);
        CHECK(std::abs(g[0]) < 1e-15);
        CHECK(g[1] == doctest::Approx(6.0).epsilon(1e-14));
    }

    TEST_CASE("gradient matches central differences of the energy") {
        std::mt19937_64 rng(5);
        for (int c : {1, 3, 5, 6}) {
            auto p = operating_point(c);
            const auto decl = p.dev->ph_declaration();
            const auto& lay = p.dev->layout();
            const int idx[5] = {lay.v_dc, lay.i_d, lay.i_q, lay.v_d, lay.v_q};
            for (int k = 0; k < 20; ++k) {
                Vector x = p.x;
                perturb(rng, x, 0.3);
                const Vector g = ph::storage_gradient(*p.dev, x, p.y, p.v);
                REQUIRE(g.size() == 5);
                for (int i = 0; i < 5; ++i) {
                    Vector a = x, b = x;
                    const double h = 1e-6;
                    a[static_cast<std::size_t>(idx[i])] += h;
                    b[static_cast<std::size_t>(idx[i])] -= h;
                    const double fd =
                        (ph::storage_energy(*p.dev, a, p.y, p.v) - ph::storage_energy(*p.dev, b, p.y, p.v)) / (2 * h);
                    CHECK(fd == doctest::Approx(g[static_cast<std::size_t>(i)]).epsilon(1e-7).scale(1.0));
                }
            }
            CHECK(decl.storage_names.size() == 5);
        }
    }
}

TEST_SUITE("energy structure") {
    TEST_CASE("structure reproduces the model at random states") {
        std::mt19937_64 rng(2024);
        int checked = 0;
        for (int c : {1, 2, 3, 4, 5, 6}) {
            auto p = operating_point(c);
            const auto& lay = p.dev->layout();
            const int idx[5] = {lay.v_dc, lay.i_d, lay.i_q, lay.v_d, lay.v_q};
            for (int k = 0; k < 1000 / 6 + 1; ++k, ++checked) {
                Vector x = p.x, y = p.y;
                perturb(rng, x, 0.25);
                perturb(rng, y, 0.25);
                x[static_cast<std::size_t>(lay.v_dc)] = std::abs(x[static_cast<std::size_t>(lay.v_dc)]) + 0.2;
                const Complex v = p.v * Complex(1.0 + 0.1 * (k % 3 - 1), 0.05);
                const auto e = p.dev->ph_evaluate(x, y, v);
                REQUIRE(e);
                Vector f(p.dev->n_states()), g(p.dev->n_algebraic());
                p.dev->evaluate(x, y, v, f, g);
                const Vector rhs = ph::structure_rhs(*e);
                REQUIRE(rhs.size() == 5);
                for (std::size_t i = 0; i < 5; ++i) {
                    const double scale = std::max(1.0, std::abs(e->xdot[i]));
                    CHECK(std::abs(rhs[i] - e->xdot[i]) <= 1e-9 * scale);
                    CHECK(std::abs(rhs[i] - f[static_cast<std::size_t>(idx[i])]) <= 1e-9 * scale);
                }
                CHECK(ph::skew_residual(e->j) < 1e-12);
                CHECK(ph::min_symmetric_eigenvalue(e->r) >= -1e-12);
                const auto bal = ph::port_power_balance(*e);
                CHECK(std::abs(bal.residual) <= 1e-9 * std::max(1.0, std::abs(bal.hdot_gradient)));
                CHECK(bal.dissipation >= -1e-12);
            }
        }
        CHECK(checked >= 1000);
    }

    TEST_CASE("dissipation is the filter resistance only") {
        auto p = operating_point(1);
        const auto e = p.dev->ph_evaluate(p.x, p.y, p.v);
        REQUIRE(e);
        const auto spec = numerics::eigenvalues(e->r);
        std::vector<double> re;
        for (const auto& l : spec.eigenvalues) re.push_back(l.real());
        std::sort(re.begin(), re.end());
        const IbrParams prm;
        const double r = prm.r_f / (prm.l_f * prm.l_f);
        REQUIRE(re.size() == 5);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(re[static_cast<std::size_t>(i)]) < 1e-12);
        CHECK(re[3] == doctest::Approx(r).epsilon(1e-10));
        CHECK(re[4] == doctest::Approx(r).epsilon(1e-10));
    }

    TEST_CASE("machine balance matches the swing equation") {
        SynchronousMachine sm("G", "1", SmParams{});
        sm.set_operating_point(1.1, 0.5);
        const Vector x{0.3, 1.002};
        const auto e = sm.ph_evaluate(x, {}, std::polar(1.0, 0.05));
        REQUIRE(e);
        const auto bal = ph::port_power_balance(*e);
        CHECK(std::abs(bal.residual) < 1e-12);
    }
}

TEST_SUITE("complex frequency") {
    std::vector<double> times() {
        std::vector<double> t;
        for (int k = 0; k < 50; ++k) t.push_back(0.001 * k);
        return t;
    }

    TEST_CASE("constant phasor") {
        const auto t = times();
        const std::vector<double> d(t.size(), 0.8), q(t.size(), 0.6);
        const auto f = ph::complex_frequency(t, d, q);
        for (std::size_t i = 0; i < t.size(); ++i) {
            CHECK(std::abs(f.rho[i]) < 1e-9);
            CHECK(std::abs(f.omega[i] - 1.0) < 1e-12);
        }
    }

    TEST_CASE("growing magnitude") {
        const auto t = times();
        std::vector<double> d, q;
        for (double s : t) {
            d.push_back(std::exp(2.0 * s));
            q.push_back(0.0);
        }
        const auto f = ph::complex_frequency(t, d, q);
        for (std::size_t i = 2; i + 2 < t.size(); ++i) CHECK(f.rho[i] == doctest::Approx(2.0).epsilon(1e-5));
    }

    TEST_CASE("rotating phasor") {
        const auto t = times();
        const double dw = 3.0;  // rad/s
        std::vector<double> d, q;
        for (double s : t) {
            d.push_back(std::cos(dw * s));
            q.push_back(std::sin(dw * s));
        }
        const auto f = ph::complex_frequency(t, d, q);
        for (std::size_t i = 2; i + 2 < t.size(); ++i) {
            CHECK(f.omega[i] == doctest::Approx(1.0 + dw / kNominalOmegaBase).epsilon(1e-9));
            CHECK(std::abs(f.rho[i]) < 1e-6);
        }
    }

    TEST_CASE("too few samples") {
        const std::vector<double> t{0, 1, 2}, d{1, 1, 1}, q{0, 0, 0};
        CHECK_THROWS(ph::complex_frequency(t, d, q));
    }
}

TEST_SUITE("structural conditions") {
    TEST_CASE("storage capacity") {
        for (int c : {1, 3, 5, 6}) CHECK(ph::tsc_condition1(operating_point(c).dev->ph_declaration()).verdict == ph::Verdict::Pass);
        SynchronousMachine sm("G", "1", SmParams{});
        CHECK(ph::tsc_condition1(sm.ph_declaration()).verdict == ph::Verdict::Pass);
        CHECK(ph::tsc_condition1(ph::passive_load_declaration(network::LoadKind::ConstantImpedance)).verdict ==
              ph::Verdict::Fail);
        // A measured loss of passivity voids the storage claim.
        CHECK(ph::tsc_condition1(sm.ph_declaration(), 1e-3).verdict == ph::Verdict::Fail);
    }

    TEST_CASE("controlled input power") {
        CHECK(ph::tsc_condition2(operating_point(1).dev->ph_declaration()).verdict == ph::Verdict::Fail);
        for (int c : {2, 3, 5, 6}) {
            CAPTURE(c);
            CHECK(ph::tsc_condition2(operating_point(c).dev->ph_declaration()).verdict == ph::Verdict::Pass);
        }
        CHECK(ph::tsc_condition2(ph::passive_load_declaration(network::LoadKind::ConstantImpedance, 0.1, 0.01)).verdict ==
              ph::Verdict::Fail);
        SynchronousMachine sm("G", "1", SmParams{});
        CHECK(ph::tsc_condition2(sm.ph_declaration()).verdict == ph::Verdict::Fail);
    }
}

TEST_SUITE("system equilibrium") {
    TEST_CASE("every preset initializes to a consistent point") {
        for (int c = 1; c <= 6; ++c) {
            CAPTURE(c);
            system::PowerSystem sys = harness::build_system(harness::case_scenario(c));
            const auto op = sys.initialize();
            CHECK(op.power_flow_mismatch < 1e-8);
            CHECK(op.max_state_derivative < 1e-9);
            CHECK(op.max_constraint < 1e-9);
        }
    }

    TEST_CASE("machine on a stiff bus swings at the analytic frequency") {
        network::Network net;
        net.buses = {{"1", network::BusType::Slack, 1.0, 0.0, 0.0, 0.0}};
        system::PowerSystem sys(net);
        const SmParams prm;
        sys.add_device(std::make_unique<InfiniteSource>("INF", "1"));
        sys.add_device(std::make_unique<SynchronousMachine>("G", "1", prm), Complex(0.6, 0.1));
        const auto op = sys.initialize();
        const auto& sm = dynamic_cast<const SynchronousMachine&>(sys.device(1));
        const double delta0 = op.x[sys.state_offset(1)];
        const double expected =
            std::sqrt(prm.omega_b * 1.0 * sm.emf() * std::cos(delta0) / (2.0 * prm.h * prm.x_s));
        const auto lin = analysis::linearize(sys, op);
        const auto ms = analysis::modal_summary(lin);
        double imag = 0.0;
        for (const auto& l : ms.spectrum.eigenvalues) imag = std::max(imag, l.imag());
        CHECK(std::abs(imag - expected) / expected < 0.01);
    }
}
