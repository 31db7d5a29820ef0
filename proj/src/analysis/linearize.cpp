#include "tsclab/analysis/linearize.hpp"

#include <algorithm>
#include <cmath>

namespace tsclab::analysis {

LinearizedSystem linearize(const numerics::DaeSystem& sys, std::span<const double> x, std::span<const double> y,
                           double eps) {
    const std::size_t n = sys.n_states, m = sys.n_algebraic;
    const DenseMatrix jac = sys.jacobian(0.0, x, y, eps);
    LinearizedSystem out;
    out.a = DenseMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out.a(i, j) = jac(i, j);
    if (m == 0) return out;

    DenseMatrix gy(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) gy(i, j) = jac(n + i, n + j);
    numerics::LuFactorization<double> lu;
    try {
        lu = numerics::LuFactorization<double>(gy);
    } catch (const numerics::SingularMatrixError& e) {
        throw LinearizationError(std::string("singular algebraic Jacobian g_y: ") + e.what());
    }
    // A -= f_y g_y^{-1} g_x, one column of g_x at a time.
    numerics::Vector col(m);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < m; ++i) col[i] = jac(n + i, j);
        const numerics::Vector s = lu.solve(col);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t k = 0; k < m; ++k) acc += jac(i, n + k) * s[k];
            out.a(i, j) -= acc;
        }
    }
    return out;
}

LinearizedSystem linearize(const system::PowerSystem& sys, const system::OperatingPoint& op, double eps) {
    numerics::Vector f(sys.n_states()), g(sys.n_algebraic());
    sys.evaluate(op.x, op.y, f, g);
    const double res = std::max(numerics::norm_inf(f), numerics::norm_inf(g));
    if (!(res <= 1e-9)) throw LinearizationError("not an equilibrium: residual " + std::to_string(res));
    for (std::size_t k = 0; k < sys.device_count(); ++k) {
        const auto& d = sys.device(k);
        const auto bounds = d.active_bounds(sys.device_states(op.x, k), sys.device_algebraics(op.y, k),
                                            sys.bus_voltage(op.y, sys.device_bus(k)));
        if (!bounds.empty())
            throw LinearizationError("device '" + d.name() + "' has an active limit (" + bounds.front() + ")");
    }
    LinearizedSystem lin = linearize(sys.dae(), op.x, op.y, eps);
    lin.labels = sys.state_labels();
    const auto angles = sys.angle_states();
    if (!angles.empty()) {
        lin.symmetry.assign(sys.n_states(), 0.0);
        for (std::size_t i : angles) lin.symmetry[i] = 1.0;
    }
    return lin;
}

ModalSummary modal_summary(const LinearizedSystem& lin) {
    ModalSummary out;
    out.spectrum = numerics::eigenvalues(lin.a);
    out.modes = out.spectrum.eigenvalues;

    if (!lin.symmetry.empty() && !out.modes.empty()) {
        const numerics::Vector az = lin.a * lin.symmetry;
        const double scale = std::max(1.0, numerics::norm_inf(lin.a)) * numerics::norm_inf(lin.symmetry);
        if (numerics::norm_inf(az) <= 1e-6 * scale) {
            const auto it = std::min_element(out.modes.begin(), out.modes.end(),
                                             [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });
            out.modes.erase(it);
            out.symmetry_removed = true;
        }
    }
    if (out.modes.empty()) {
        out.stable = true;
        return out;
    }
    out.rightmost = *std::max_element(out.modes.begin(), out.modes.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    out.stable = out.rightmost.real() < kStabilityMargin;

    double best_re = -std::numeric_limits<double>::infinity();
    for (const Complex l : out.modes) {
        if (std::abs(l.imag()) < 1e-9) continue;
        if (l.real() > best_re) {
            best_re = l.real();
            out.critical_damping = -l.real() / std::abs(l);
        }
    }
    return out;
}

std::optional<Complex> critical_eigenvalue(const LinearizedSystem& lin, const ModalSummary& modes,
                                           const std::string& prefix, double threshold) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < lin.labels.size(); ++i)
        if (lin.labels[i].rfind(prefix, 0) == 0) idx.push_back(i);
    if (idx.empty()) return std::nullopt;
    std::optional<Complex> best;
    for (const Complex l : modes.modes) {
        if (l.imag() < 0.0) continue;  // one of each conjugate pair
        if (best && l.real() <= best->real()) continue;
        const numerics::Vector p = numerics::participation(lin.a, l);
        double share = 0.0;
        for (std::size_t i : idx) share += p[i];
        if (share > threshold) best = l;
    }
    return best;
}

}  // namespace tsclab::analysis
