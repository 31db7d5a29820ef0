#pragma once

#include "tsclab/numerics/linalg.hpp"

namespace tsclab::numerics {

/// Eigenvalues of a real matrix. For real input the spectrum is closed under
/// conjugation; pairs are stored adjacently with the positive imaginary part first.
struct ComplexSpectrum {
    ComplexVector eigenvalues;

    std::size_t size() const noexcept { return eigenvalues.size(); }
    /// Index of the eigenvalue with the largest real part (ties: largest imaginary part).
    std::size_t rightmost() const;
    double max_real() const;
};

/// Thrown when shifted QR exceeds its iteration cap. Carries the eigenvalues
/// already deflated.
class EigenConvergenceError : public ConvergenceError {
public:
    EigenConvergenceError(const std::string& what, ComplexSpectrum partial)
        : ConvergenceError(what), partial_(std::move(partial)) {}
    const ComplexSpectrum& partial() const noexcept { return partial_; }

private:
    ComplexSpectrum partial_;
};

/// Balancing, Householder reduction to upper Hessenberg form and Francis double-shift QR.
ComplexSpectrum eigenvalues(const DenseMatrix& a);

/// Householder reduction to upper Hessenberg form (similarity transform).
DenseMatrix hessenberg(const DenseMatrix& a);

/// Right eigenvector for an (approximate) eigenvalue by inverse iteration,
/// normalized to unit 2-norm.
ComplexVector eigenvector(const DenseMatrix& a, Complex lambda);

/// Normalized participation factors |l_k r_k| / sum_k |l_k r_k| of every state in the mode lambda.
Vector participation(const DenseMatrix& a, Complex lambda);

}  // namespace tsclab::numerics
