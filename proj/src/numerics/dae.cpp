#include "tsclab/numerics/dae.hpp"

#include <cmath>
#include <limits>

namespace tsclab::numerics {

void DaeSystem::residual(double t, std::span<const double> x, std::span<const double> xdot,
                         std::span<const double> y, std::span<double> out) const {
    if (x.size() != n_states || xdot.size() != n_states || y.size() != n_algebraic ||
        out.size() != n_states + n_algebraic) {
        throw std::invalid_argument("DaeSystem::residual: dimension mismatch");
    }
    rhs(t, x, y, out.subspan(0, n_states));
    for (std::size_t i = 0; i < n_states; ++i) out[i] = xdot[i] - out[i];
    constraints(t, x, y, out.subspan(n_states));
}

DenseMatrix DaeSystem::jacobian(double t, std::span<const double> x, std::span<const double> y, double eps) const {
    const std::size_t n = n_states, m = n_algebraic;
    Vector z(n + m);
    std::copy(x.begin(), x.end(), z.begin());
    std::copy(y.begin(), y.end(), z.begin() + static_cast<std::ptrdiff_t>(n));
    auto fn = [&](std::span<const double> zz, std::span<double> out) {
        rhs(t, zz.subspan(0, n), zz.subspan(n), out.subspan(0, n));
        constraints(t, zz.subspan(0, n), zz.subspan(n), out.subspan(n));
    };
    return fd_jacobian(fn, z, n + m, eps);
}

void TrapezoidalIntegrator::refresh(const DaeSystem& sys, double t, std::span<const double> z) {
    const std::size_t n = sys.n_states;
    system_jacobian_ = sys.jacobian(t, z.subspan(0, n), z.subspan(n), opts_.fd_eps);
    factor_.reset();
    ++jacobian_builds_;
}

void TrapezoidalIntegrator::factor(const DaeSystem& sys, double h) {
    const std::size_t n = sys.n_states, nm = sys.n_states + sys.n_algebraic;
    DenseMatrix jac(nm, nm);
    const DenseMatrix& js = *system_jacobian_;
    for (std::size_t i = 0; i < nm; ++i)
        for (std::size_t j = 0; j < nm; ++j) {
            if (i < n) {
                jac(i, j) = (i == j ? 1.0 : 0.0) - 0.5 * h * js(i, j);
            } else {
                jac(i, j) = js(i, j);
            }
        }
    factor_.emplace(std::move(jac));
    factor_h_ = h;
}

bool TrapezoidalIntegrator::newton(const DaeSystem& sys, double t, double h, std::span<const double> x0,
                                   std::span<const double> f0, Vector& z, int& iterations, double& rnorm,
                                   bool fresh) {
    const std::size_t n = sys.n_states, nm = sys.n_states + sys.n_algebraic;
    Vector r(nm);
    auto eval = [&]() {
        const std::span<const double> zs(z);
        sys.rhs(t + h, zs.subspan(0, n), zs.subspan(n), std::span<double>(r).subspan(0, n));
        for (std::size_t i = 0; i < n; ++i) r[i] = z[i] - x0[i] - 0.5 * h * (f0[i] + r[i]);
        sys.constraints(t + h, zs.subspan(0, n), zs.subspan(n), std::span<double>(r).subspan(n));
        return norm_inf(r);
    };
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it <= opts_.max_iter; ++it) {
        rnorm = eval();
        iterations = it;
        if (!std::isfinite(rnorm)) return false;
        if (rnorm <= opts_.newton_tol) return true;
        if (it == opts_.max_iter) return false;
        // A stale Jacobian that contracts poorly is not worth continuing with.
        if (!fresh && it >= 3 && rnorm > 0.5 * prev) return false;
        prev = rnorm;
        if (!system_jacobian_) {
            refresh(sys, t + h, z);
            fresh = true;
        }
        if (!factor_ || factor_h_ != h) factor(sys, h);
        const Vector dx = factor_->solve(r);
        for (std::size_t i = 0; i < nm; ++i) z[i] -= dx[i];
    }
    return false;
}

StepOutcome TrapezoidalIntegrator::step(const DaeSystem& sys, double t, double h, std::span<const double> x,
                                        std::span<const double> y) {
    const std::size_t n = sys.n_states, m = sys.n_algebraic;
    if (x.size() != n || y.size() != m) throw std::invalid_argument("trapezoidal step: dimension mismatch");
    Vector f0(n);
    sys.rhs(t, x, y, f0);
    if (!all_finite(f0)) throw StepRejected("trapezoidal step: non-finite derivative at step start");

    auto start = [&]() {
        Vector z(n + m);
        std::copy(x.begin(), x.end(), z.begin());
        std::copy(y.begin(), y.end(), z.begin() + static_cast<std::ptrdiff_t>(n));
        return z;
    };

    StepOutcome out;
    Vector z = start();
    bool ok = false;
    try {
        ok = newton(sys, t, h, x, f0, z, out.iterations, out.residual_norm, false);
        if (!ok) {
            z = start();
            refresh(sys, t + h, z);
            ok = newton(sys, t, h, x, f0, z, out.iterations, out.residual_norm, true);
        }
    } catch (const SingularMatrixError& e) {
        invalidate();
        throw StepRejected(std::string("trapezoidal step: ") + e.what());
    }
    if (!ok) {
        invalidate();
        throw StepRejected("trapezoidal step: Newton did not converge (residual " + std::to_string(out.residual_norm) +
                           ")");
    }
    out.x.assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n));
    out.y.assign(z.begin() + static_cast<std::ptrdiff_t>(n), z.end());
    return out;
}

Vector TrapezoidalIntegrator::solve_algebraic(const DaeSystem& sys, double t, std::span<const double> x,
                                              std::span<const double> y0) {
    auto g = [&](std::span<const double> y, std::span<double> out) { sys.constraints(t, x, y, out); };
    NewtonOptions opts;
    opts.tol = opts_.newton_tol * 1e-2;
    opts.max_iter = 50;
    opts.fd_eps = opts_.fd_eps;
    Vector y(y0.begin(), y0.end());
    return newton_solve(g, std::move(y), opts).x;
}

StepOutcome trapezoidal_step(const DaeSystem& sys, double t, double h, std::span<const double> x,
                             std::span<const double> y, const TrapezoidalOptions& opts) {
    TrapezoidalIntegrator integrator(opts);
    return integrator.step(sys, t, h, x, y);
}

}  // namespace tsclab::numerics
