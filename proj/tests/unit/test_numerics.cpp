#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "tsclab/numerics/dae.hpp"
#include "tsclab/numerics/eigen.hpp"
#include "tsclab/numerics/linalg.hpp"

using namespace tsclab::numerics;

TEST_SUITE("linear solve") {
    TEST_CASE("identity returns the right-hand side") {
        const Vector x = lu_solve(DenseMatrix::identity(3), Vector{1, 2, 3});
        CHECK(x == Vector{1, 2, 3});
    }

    TEST_CASE("diagonal system") {
        DenseMatrix a(2, 2);
        a(0, 0) = 2;
        a(1, 1) = 4;
        const Vector x = lu_solve(a, Vector{2, 4});
        CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-15));
    }

    TEST_CASE("random 8x8 multiply-back") {
        std::mt19937_64 rng(7);
        const DenseMatrix a = testing::random_matrix(rng, 8, 4.0);
        Vector b(8);
        std::uniform_real_distribution<double> u(-1, 1);
        for (double& v : b) v = u(rng);
        const Vector x = lu_solve(a, b);
        const Vector r = a * x;
        double worst = 0;
        for (std::size_t i = 0; i < 8; ++i) worst = std::max(worst, std::abs(r[i] - b[i]));
        CHECK(worst < 1e-10);
    }

    TEST_CASE("multiply-back residual scales with the right-hand side up to 200x200") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(-10, 10);
        for (std::size_t n : {3u, 17u, 64u, 200u}) {
            const DenseMatrix a = testing::random_matrix(rng, n, static_cast<double>(n));
            Vector b(n);
            for (double& v : b) v = u(rng);
            const Vector r = a * lu_solve(a, b);
            double worst = 0;
            for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(r[i] - b[i]));
            CHECK(worst <= 1e-10 * (1.0 + norm_inf(b)));
        }
    }

    TEST_CASE("singular matrix is reported") {
        DenseMatrix a(2, 2, std::vector<double>{1, 2, 2, 4});
        CHECK_THROWS_AS(lu_solve(a, Vector{1, 1}), SingularMatrixError);
    }
}

TEST_SUITE("newton") {
    TEST_CASE("affine residual converges in one iteration") {
        const Vector c{3.0, -1.5};
        const VectorFunction r = [&](std::span<const double> x, std::span<double> out) {
            for (std::size_t i = 0; i < 2; ++i) out[i] = x[i] - c[i];
        };
        const auto exact = newton_solve(r, Vector{10.0, 20.0}, {}, [](std::span<const double>) {
            return DenseMatrix::identity(2);
        });
        CHECK(exact.iterations == 1);
        CHECK(exact.x[0] == doctest::Approx(3.0));
        CHECK(exact.x[1] == doctest::Approx(-1.5));
        // With a difference Jacobian one step lands within rounding of the root.
        const auto fd = newton_solve(r, Vector{10.0, 20.0}, {1e-6, 50, 1e-7});
        CHECK(fd.iterations == 1);
    }

    TEST_CASE("square root of four from x0 = 3") {
        const auto res = newton_solve([](std::span<const double> x, std::span<double> out) { out[0] = x[0] * x[0] - 4; },
                                      Vector{3.0}, {1e-10, 50, 1e-7});
        CHECK(std::abs(res.x[0] - 2.0) < 1e-10);
    }

    TEST_CASE("two-bus power transfer angle") {
        // Unknown angle at bus 2 and a fixed 1 pu magnitude at both ends.
        const double p = 0.5, x_line = 0.1;
        const auto res = newton_solve(
            [&](std::span<const double> th, std::span<double> out) { out[0] = std::sin(th[0]) / x_line - p; }, Vector{0.0});
        CHECK(std::abs(res.x[0] - std::asin(p * x_line)) < 1e-10);
    }
}

TEST_SUITE("finite differences") {
    TEST_CASE("linear map is reproduced") {
        std::mt19937_64 rng(3);
        const DenseMatrix m = testing::random_matrix(rng, 5);
        const DenseMatrix j = fd_jacobian(
            [&](std::span<const double> x, std::span<double> out) {
                const Vector y = m * Vector(x.begin(), x.end());
                std::copy(y.begin(), y.end(), out.begin());
            },
            Vector{0.3, -1, 2, 0.5, 4}, 5);
        for (std::size_t a = 0; a < 5; ++a)
            for (std::size_t b = 0; b < 5; ++b) CHECK(std::abs(j(a, b) - m(a, b)) < 1e-8);
    }

    TEST_CASE("scalar quadratic") {
        const DenseMatrix j =
            fd_jacobian([](std::span<const double> x, std::span<double> out) { out[0] = x[0] * x[0]; }, Vector{3.0}, 1);
        CHECK(std::abs(j(0, 0) - 6.0) < 1e-6);
    }
}

TEST_SUITE("eigenvalues") {
    TEST_CASE("rotation matrix") {
        const auto s = eigenvalues(DenseMatrix(2, 2, std::vector<double>{0, 1, -1, 0}));
        CHECK(testing::multiset_distance(s.eigenvalues, {{0, 1}, {0, -1}}) < 1e-12);
    }

    TEST_CASE("diagonal") {
        DenseMatrix a(3, 3);
        a(0, 0) = 1;
        a(1, 1) = 2;
        a(2, 2) = 3;
        CHECK(testing::multiset_distance(eigenvalues(a).eigenvalues, {1.0, 2.0, 3.0}) < 1e-12);
    }

    TEST_CASE("companion matrix roots") {
        // Multiply out (l+1)(l+2)(l^2+2l+5) independently of the solver.
        std::vector<double> poly{1.0};
        auto mul = [&](const std::vector<double>& f) {
            std::vector<double> out(poly.size() + f.size() - 1, 0.0);
            for (std::size_t i = 0; i < poly.size(); ++i)
                for (std::size_t j = 0; j < f.size(); ++j) out[i + j] += poly[i] * f[j];
            poly = out;
        };
        mul({1, 1});
        mul({1, 2});
        mul({1, 2, 5});
        const std::size_t n = poly.size() - 1;
        DenseMatrix c(n, n);
        for (std::size_t j = 0; j < n; ++j) c(0, j) = -poly[j + 1] / poly[0];
        for (std::size_t i = 1; i < n; ++i) c(i, i - 1) = 1.0;
        const auto s = eigenvalues(c);
        CHECK(testing::multiset_distance(s.eigenvalues, {-1.0, -2.0, {-1, 2}, {-1, -2}}) < 1e-9);
        CHECK(s.max_real() == doctest::Approx(-1.0));
    }

    TEST_CASE("spectrum is invariant under permutation similarity") {
        std::mt19937_64 rng(19);
        for (std::size_t n : {4u, 9u, 25u}) {
            const DenseMatrix a = testing::random_matrix(rng, n);
            std::vector<std::size_t> perm(n);
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
            DenseMatrix b(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) b(i, j) = a(perm[i], perm[j]);
            CHECK(testing::multiset_distance(eigenvalues(a).eigenvalues, eigenvalues(b).eigenvalues) < 1e-7);
        }
    }

    TEST_CASE("conjugate pairs are adjacent with the positive part first") {
        std::mt19937_64 rng(5);
        const auto s = eigenvalues(testing::random_matrix(rng, 12));
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s.eigenvalues[i].imag() > 0) {
                REQUIRE(i + 1 < s.size());
                CHECK(std::abs(s.eigenvalues[i + 1] - std::conj(s.eigenvalues[i])) < 1e-9);
            }
        }
    }

    TEST_CASE("participation factors sum to one") {
        std::mt19937_64 rng(23);
        const DenseMatrix a = testing::random_matrix(rng, 6);
        const auto s = eigenvalues(a);
        const Vector p = participation(a, s.eigenvalues[0]);
        CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0));
    }
}

namespace {

DaeSystem scalar_decay() {
    DaeSystem s;
    s.n_states = 1;
    s.rhs = [](double, std::span<const double> x, std::span<const double>, std::span<double> f) { f[0] = -x[0]; };
    s.constraints = [](double, std::span<const double>, std::span<const double>, std::span<double>) {};
    return s;
}

double decay_error(double h) {
    const DaeSystem sys = scalar_decay();
    TrapezoidalIntegrator integ;
    Vector x{1.0}, y;
    const int n = static_cast<int>(std::lround(1.0 / h));
    for (int k = 0; k < n; ++k) x = integ.step(sys, k * h, h, x, y).x;
    return std::abs(x[0] - std::exp(-1.0));
}

}  // namespace

TEST_SUITE("trapezoidal integration") {
    TEST_CASE("constant dynamics are held exactly") {
        DaeSystem s;
        s.n_states = 2;
        s.rhs = [](double, std::span<const double>, std::span<const double>, std::span<double> f) { f[0] = f[1] = 0; };
        s.constraints = [](double, std::span<const double>, std::span<const double>, std::span<double>) {};
        const auto out = trapezoidal_step(s, 0.0, 1e-3, Vector{0.7, -2.5}, Vector{});
        CHECK(out.x == Vector{0.7, -2.5});
    }

    TEST_CASE("exponential decay to t = 1") { CHECK(decay_error(1e-3) < 1e-4); }

    TEST_CASE("second-order convergence on step halving") {
        const double ratio = decay_error(0.02) / decay_error(0.01);
        CHECK(ratio >= 3.5);
        CHECK(ratio <= 4.5);
    }

    TEST_CASE("undamped oscillator conserves its quadratic invariant") {
        DaeSystem s;
        s.n_states = 2;
        s.rhs = [](double, std::span<const double> x, std::span<const double>, std::span<double> f) {
            f[0] = x[1];
            f[1] = -x[0];
        };
        s.constraints = [](double, std::span<const double>, std::span<const double>, std::span<double>) {};
        TrapezoidalOptions tight;
        tight.newton_tol = 1e-13;
        TrapezoidalIntegrator integ(tight);
        Vector x{1.0, 0.0};
        double worst = 0.0;
        for (int k = 0; k < 2000; ++k) {
            const double e0 = x[0] * x[0] + x[1] * x[1];
            x = integ.step(s, k * 1e-3, 1e-3, x, {}).x;
            worst = std::max(worst, std::abs(x[0] * x[0] + x[1] * x[1] - e0));
        }
        CHECK(worst < 1e-9);
    }

    TEST_CASE("index-1 algebraic constraint is satisfied after each step") {
        // x' = -y, 0 = y - 2x  =>  x(t) = exp(-2t)
        DaeSystem s;
        s.n_states = 1;
        s.n_algebraic = 1;
        s.rhs = [](double, std::span<const double>, std::span<const double> y, std::span<double> f) { f[0] = -y[0]; };
        s.constraints = [](double, std::span<const double> x, std::span<const double> y, std::span<double> g) {
            g[0] = y[0] - 2 * x[0];
        };
        TrapezoidalIntegrator integ;
        Vector x{1.0}, y{2.0};
        for (int k = 0; k < 500; ++k) {
            auto out = integ.step(s, k * 1e-3, 1e-3, x, y);
            x = out.x;
            y = out.y;
            CHECK(std::abs(y[0] - 2 * x[0]) < 1e-8);
        }
        CHECK(std::abs(x[0] - std::exp(-1.0)) < 1e-5);
    }

    TEST_CASE("non-convergent step is rejected") {
        DaeSystem s;
        s.n_states = 0;
        s.n_algebraic = 1;
        s.rhs = [](double, std::span<const double>, std::span<const double>, std::span<double>) {};
        s.constraints = [](double, std::span<const double>, std::span<const double> y, std::span<double> g) {
            g[0] = y[0] * y[0] + 1.0;  // no real root
        };
        CHECK_THROWS(trapezoidal_step(s, 0.0, 1e-3, Vector{}, Vector{0.5}));
    }
}
