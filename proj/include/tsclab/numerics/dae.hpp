#pragma once

#include <functional>
#include <optional>

#include "tsclab/numerics/linalg.hpp"

namespace tsclab::numerics {

/// Semi-explicit DAE  x' = f(t, x, y),  0 = g(t, x, y).
struct DaeSystem {
    std::size_t n_states = 0;
    std::size_t n_algebraic = 0;
    std::function<void(double t, std::span<const double> x, std::span<const double> y, std::span<double> f)> rhs;
    std::function<void(double t, std::span<const double> x, std::span<const double> y, std::span<double> g)>
        constraints;

    /// Implicit residual form: (x' - f(t,x,y), g(t,x,y)), length n_states + n_algebraic.
    void residual(double t, std::span<const double> x, std::span<const double> xdot, std::span<const double> y,
                  std::span<double> out) const;

    /// Jacobian of (f, g) with respect to (x, y) by central differences.
    DenseMatrix jacobian(double t, std::span<const double> x, std::span<const double> y, double eps = 1e-7) const;
};

class StepRejected : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TrapezoidalOptions {
    double newton_tol = 1e-8;
    int max_iter = 20;
    double fd_eps = 1e-7;
};

struct StepOutcome {
    Vector x;
    Vector y;
    int iterations = 0;
    double residual_norm = 0.0;
};

/// Implicit trapezoidal rule for semi-explicit DAEs. Solves
///   x1 - x0 - h/2 (f(x0,y0) + f(x1,y1)) = 0,   g(x1,y1) = 0
/// jointly by Newton. The system Jacobian is cached and reused across steps
/// (chord iteration) and refreshed whenever convergence stalls.
class TrapezoidalIntegrator {
public:
    explicit TrapezoidalIntegrator(TrapezoidalOptions opts = {}) : opts_(opts) {}

    StepOutcome step(const DaeSystem& sys, double t, double h, std::span<const double> x,
                     std::span<const double> y);

    /// Solves g(t, x, y) = 0 for y with x frozen (used after discrete events).
    Vector solve_algebraic(const DaeSystem& sys, double t, std::span<const double> x, std::span<const double> y0);

    void invalidate() noexcept {
        system_jacobian_.reset();
        factor_.reset();
    }
    const TrapezoidalOptions& options() const noexcept { return opts_; }
    long jacobian_builds() const noexcept { return jacobian_builds_; }

private:
    bool newton(const DaeSystem& sys, double t, double h, std::span<const double> x0, std::span<const double> f0,
                Vector& z, int& iterations, double& rnorm, bool fresh);
    void refresh(const DaeSystem& sys, double t, std::span<const double> z);
    void factor(const DaeSystem& sys, double h);

    TrapezoidalOptions opts_;
    std::optional<DenseMatrix> system_jacobian_;
    std::optional<LuFactorization<double>> factor_;
    double factor_h_ = 0.0;
    long jacobian_builds_ = 0;
};

/// Convenience wrapper: a single trapezoidal step with a fresh integrator.
StepOutcome trapezoidal_step(const DaeSystem& sys, double t, double h, std::span<const double> x,
                             std::span<const double> y, const TrapezoidalOptions& opts = {});

}  // namespace tsclab::numerics
