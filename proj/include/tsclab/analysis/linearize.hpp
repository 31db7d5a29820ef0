#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsclab/numerics/dae.hpp"
#include "tsclab/numerics/eigen.hpp"
#include "tsclab/system/power_system.hpp"

namespace tsclab::analysis {

using numerics::Complex;
using numerics::DenseMatrix;

class LinearizationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LinearizedSystem {
    DenseMatrix a;  // f_x - f_y g_y^{-1} g_x
    std::vector<std::string> labels;
    /// Rotational-symmetry direction (1 on every absolute angle), empty if none.
    std::vector<double> symmetry;
};

/// Reduced state matrix of a semi-explicit DAE by central differences.
LinearizedSystem linearize(const numerics::DaeSystem& sys, std::span<const double> x, std::span<const double> y,
                           double eps = 1e-6);

/// Linearizes a power system at an equilibrium. Rejects points with an active
/// current limiter or an equilibrium residual above 1e-9.
LinearizedSystem linearize(const system::PowerSystem& sys, const system::OperatingPoint& op, double eps = 1e-6);

struct ModalSummary {
    numerics::ComplexSpectrum spectrum;  // every eigenvalue of A
    std::vector<Complex> modes;          // spectrum without the rotational zero
    bool symmetry_removed = false;
    Complex rightmost;                   // of `modes`
    bool stable = false;
    /// Damping ratio -Re/|λ| of the rightmost oscillatory mode (1 when none).
    double critical_damping = 1.0;
};

/// Real parts below this count as stable.
inline constexpr double kStabilityMargin = -1e-7;

ModalSummary modal_summary(const LinearizedSystem& lin);

/// Rightmost mode among those with participation above `threshold` in the
/// states whose labels start with `prefix`.
std::optional<Complex> critical_eigenvalue(const LinearizedSystem& lin, const ModalSummary& modes,
                                           const std::string& prefix, double threshold = 1e-3);

}  // namespace tsclab::analysis
