#pragma once

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include "tsclab/numerics/matrix.hpp"

namespace testing {

using tsclab::numerics::Complex;
using tsclab::numerics::DenseMatrix;

inline DenseMatrix random_matrix(std::mt19937_64& rng, std::size_t n, double diag_boost = 0.0) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = u(rng) + (i == j ? diag_boost : 0.0);
    return a;
}

inline std::vector<Complex> sorted(std::vector<Complex> v) {
    std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
        if (std::abs(a.real() - b.real()) > 1e-9) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return v;
}

/// Largest distance from each element of `a` to the nearest unused element of `b`.
inline double multiset_distance(const std::vector<Complex>& a, std::vector<Complex> b) {
    if (a.size() != b.size()) return 1e300;
    double worst = 0.0;
    for (const Complex x : a) {
        auto it = std::min_element(b.begin(), b.end(), [x](Complex p, Complex q) { return std::abs(p - x) < std::abs(q - x); });
        worst = std::max(worst, std::abs(*it - x));
        b.erase(it);
    }
    return worst;
}

}  // namespace testing
