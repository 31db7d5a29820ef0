#pragma once

#include <functional>
#include <stdexcept>

#include "tsclab/numerics/matrix.hpp"

namespace tsclab::numerics {

class SingularMatrixError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// LU factorization with partial pivoting, reusable across right-hand sides.
/// A pivot is considered singular when its magnitude falls below
/// 1e-14 times the largest row norm of the input.
template <typename T>
class LuFactorization {
public:
    LuFactorization() = default;
    explicit LuFactorization(Matrix<T> a);

    std::vector<T> solve(std::span<const T> b) const;
    std::vector<T> solve(const std::vector<T>& b) const { return solve(std::span<const T>(b)); }
    std::size_t size() const noexcept { return lu_.rows(); }
    bool empty() const noexcept { return lu_.rows() == 0; }

private:
    Matrix<T> lu_;
    std::vector<std::size_t> perm_;
};

extern template class LuFactorization<double>;
extern template class LuFactorization<Complex>;

Vector lu_solve(const DenseMatrix& a, std::span<const double> b);
ComplexVector lu_solve(const ComplexMatrix& a, std::span<const Complex> b);

using VectorFunction = std::function<void(std::span<const double> x, std::span<double> out)>;

/// Central-difference Jacobian. The perturbation for column i is eps·(1+|x_i|).
DenseMatrix fd_jacobian(const VectorFunction& fn, std::span<const double> x, std::size_t n_out,
                        double eps = 1e-7);

struct NewtonOptions {
    double tol = 1e-10;
    int max_iter = 50;
    double fd_eps = 1e-7;
};

struct NewtonResult {
    Vector x;
    int iterations = 0;
    double residual_norm = 0.0;
};

/// Full Newton iteration on a square residual. The Jacobian is supplied or
/// estimated by fd_jacobian at every iterate.
NewtonResult newton_solve(const VectorFunction& residual, Vector x0, const NewtonOptions& opts = {},
                          const std::function<DenseMatrix(std::span<const double>)>& jacobian = {});

}  // namespace tsclab::numerics
