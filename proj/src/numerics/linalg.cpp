#include "tsclab/numerics/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tsclab::numerics {

double norm_inf(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double norm_inf(const DenseMatrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (double x : a.row(i)) s += std::abs(x);
        m = std::max(m, s);
    }
    return m;
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

template <typename T>
LuFactorization<T>::LuFactorization(Matrix<T> a) : lu_(std::move(a)) {
    if (!lu_.square()) throw std::invalid_argument("LU: matrix must be square");
    const std::size_t n = lu_.rows();
    perm_.resize(n);
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});

    double max_row_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (const T& x : lu_.row(i)) s += std::abs(x);
        max_row_norm = std::max(max_row_norm, s);
    }
    const double pivot_floor = 1e-14 * max_row_norm;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(lu_(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(lu_(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (!(best > pivot_floor) || best == 0.0) {
            throw SingularMatrixError("LU: singular matrix (pivot " + std::to_string(best) + " at column " +
                                      std::to_string(k) + ")");
        }
        if (p != k) {
            std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(p).begin());
            std::swap(perm_[k], perm_[p]);
        }
        const T pivot = lu_(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const T factor = lu_(i, k) / pivot;
            lu_(i, k) = factor;
            if (factor == T{}) continue;
            auto ri = lu_.row(i);
            const auto rk = lu_.row(k);
            for (std::size_t j = k + 1; j < n; ++j) ri[j] -= factor * rk[j];
        }
    }
}

template <typename T>
std::vector<T> LuFactorization<T>::solve(std::span<const T> b) const {
    const std::size_t n = lu_.rows();
    if (b.size() != n) throw std::invalid_argument("LU solve: rhs length mismatch");
    std::vector<T> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
    for (std::size_t i = 0; i < n; ++i) {
        T acc = x[i];
        const auto r = lu_.row(i);
        for (std::size_t j = 0; j < i; ++j) acc -= r[j] * x[j];
        x[i] = acc;
    }
    for (std::size_t ii = n; ii-- > 0;) {
        T acc = x[ii];
        const auto r = lu_.row(ii);
        for (std::size_t j = ii + 1; j < n; ++j) acc -= r[j] * x[j];
        x[ii] = acc / r[ii];
    }
    return x;
}

template class LuFactorization<double>;
template class LuFactorization<Complex>;

Vector lu_solve(const DenseMatrix& a, std::span<const double> b) {
    if (b.size() != a.rows()) throw std::invalid_argument("lu_solve: rhs length mismatch");
    return LuFactorization<double>(a).solve(b);
}

ComplexVector lu_solve(const ComplexMatrix& a, std::span<const Complex> b) {
    if (b.size() != a.rows()) throw std::invalid_argument("lu_solve: rhs length mismatch");
    return LuFactorization<Complex>(a).solve(b);
}

DenseMatrix fd_jacobian(const VectorFunction& fn, std::span<const double> x, std::size_t n_out, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("fd_jacobian: eps must be positive");
    const std::size_t n = x.size();
    DenseMatrix jac(n_out, n);
    Vector xp(x.begin(), x.end());
    Vector fp(n_out), fm(n_out);
    for (std::size_t j = 0; j < n; ++j) {
        const double h = eps * (1.0 + std::abs(x[j]));
        const double orig = xp[j];
        xp[j] = orig + h;
        fn(xp, fp);
        xp[j] = orig - h;
        fn(xp, fm);
        xp[j] = orig;
        const double inv = 1.0 / (2.0 * h);
        for (std::size_t i = 0; i < n_out; ++i) jac(i, j) = (fp[i] - fm[i]) * inv;
    }
    return jac;
}

NewtonResult newton_solve(const VectorFunction& residual, Vector x0, const NewtonOptions& opts,
                          const std::function<DenseMatrix(std::span<const double>)>& jacobian) {
    NewtonResult result;
    result.x = std::move(x0);
    const std::size_t n = result.x.size();
    Vector r(n);
    for (int it = 0; it <= opts.max_iter; ++it) {
        residual(result.x, r);
        if (!all_finite(r)) throw ConvergenceError("newton_solve: residual is not finite");
        result.residual_norm = norm_inf(r);
        result.iterations = it;
        if (result.residual_norm <= opts.tol) return result;
        if (it == opts.max_iter) break;
        const DenseMatrix jac = jacobian ? jacobian(result.x) : fd_jacobian(residual, result.x, n, opts.fd_eps);
        const Vector dx = lu_solve(jac, r);
        for (std::size_t i = 0; i < n; ++i) result.x[i] -= dx[i];
    }
    throw ConvergenceError("newton_solve: no convergence after " + std::to_string(opts.max_iter) +
                           " iterations (residual " + std::to_string(result.residual_norm) + ")");
}

}  // namespace tsclab::numerics
