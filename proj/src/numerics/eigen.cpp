#include "tsclab/numerics/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace tsclab::numerics {

std::size_t ComplexSpectrum::rightmost() const {
    if (eigenvalues.empty()) throw std::logic_error("rightmost: empty spectrum");
    std::size_t best = 0;
    for (std::size_t i = 1; i < eigenvalues.size(); ++i) {
        const auto& a = eigenvalues[i];
        const auto& b = eigenvalues[best];
        if (a.real() > b.real() || (a.real() == b.real() && a.imag() > b.imag())) best = i;
    }
    return best;
}

double ComplexSpectrum::max_real() const { return eigenvalues[rightmost()].real(); }

namespace {

// Osborne/Parlett-Reinsch balancing with radix-2 scaling (exact in floating point).
void balance(DenseMatrix& a) {
    const std::size_t n = a.rows();
    constexpr double radix = 2.0;
    constexpr double sqrdx = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                g = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

double sign_of(double magnitude, double ref) { return ref >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude); }

// Francis double-shift QR on an upper Hessenberg matrix (destroys h).
ComplexSpectrum hessenberg_qr(DenseMatrix& a) {
    const int n = static_cast<int>(a.rows());
    std::vector<double> wr(n, 0.0), wi(n, 0.0);
    std::vector<bool> found(n, false);

    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));

    int nn = n - 1;
    double t = 0.0;
    constexpr int max_its = 60;
    while (nn >= 0) {
        int its = 0;
        int l = 0;
        do {
            for (l = nn; l >= 1; --l) {
                double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) + s == s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = a(nn, nn);
            if (l == nn) {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                found[nn] = true;
                --nn;
            } else {
                double y = a(nn - 1, nn - 1);
                double w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    const double p = 0.5 * (y - x);
                    const double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign_of(z, p);
                        wr[nn - 1] = wr[nn] = x + z;
                        if (z != 0.0) wr[nn] = x - w / z;
                        wi[nn - 1] = wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = wr[nn] = x + p;
                        wi[nn - 1] = z;
                        wi[nn] = -z;
                    }
                    found[nn] = found[nn - 1] = true;
                    nn -= 2;
                } else {
                    if (its == max_its) {
                        ComplexSpectrum partial;
                        for (int i = 0; i < n; ++i)
                            if (found[i]) partial.eigenvalues.emplace_back(wr[i], wi[i]);
                        throw EigenConvergenceError("eigenvalues: QR iteration cap reached", std::move(partial));
                    }
                    if (its == 10 || its == 20 || its == 40) {
                        // exceptional shift
                        t += x;
                        for (int i = 0; i <= nn; ++i) a(i, i) -= x;
                        const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m = nn - 2;
                    double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
                    for (; m >= l; --m) {
                        z = a(m, m);
                        r = x - z;
                        double s = y - z;
                        p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - r - s;
                        r = a(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
                        if (u + v == v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        a(i, i - 2) = 0.0;
                        if (i != m + 2) a(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = 0.0;
                            if (k != nn - 1) r = a(k + 2, k - 1);
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
                        if (s != 0.0) {
                            if (k == m) {
                                if (l != m) a(k, k - 1) = -a(k, k - 1);
                            } else {
                                a(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for (int j = k; j <= nn; ++j) {
                                p = a(k, j) + q * a(k + 1, j);
                                if (k != nn - 1) {
                                    p += r * a(k + 2, j);
                                    a(k + 2, j) -= p * z;
                                }
                                a(k + 1, j) -= p * y;
                                a(k, j) -= p * x;
                            }
                            const int mmin = nn < k + 3 ? nn : k + 3;
                            for (int i = l; i <= mmin; ++i) {
                                p = x * a(i, k) + y * a(i, k + 1);
                                if (k != nn - 1) {
                                    p += z * a(i, k + 2);
                                    a(i, k + 2) -= p * r;
                                }
                                a(i, k + 1) -= p * q;
                                a(i, k) -= p;
                            }
                        }
                    }
                }
            }
        } while (nn >= 0 && l < nn - 1);
    }

    ComplexSpectrum spec;
    spec.eigenvalues.reserve(n);
    for (int i = 0; i < n; ++i) {
        if (wi[i] < 0.0 && i > 0 && wi[i - 1] > 0.0) continue;  // conjugate emitted with its partner
        spec.eigenvalues.emplace_back(wr[i], wi[i]);
        if (wi[i] > 0.0) spec.eigenvalues.emplace_back(wr[i], -wi[i]);
    }
    return spec;
}

}  // namespace

DenseMatrix hessenberg(const DenseMatrix& input) {
    if (!input.square()) throw std::invalid_argument("hessenberg: matrix must be square");
    DenseMatrix a = input;
    const std::size_t n = a.rows();
    if (n < 3) return a;
    Vector v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double alpha = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) alpha += a(i, k) * a(i, k);
        alpha = std::sqrt(alpha);
        if (alpha == 0.0) continue;
        if (a(k + 1, k) > 0.0) alpha = -alpha;
        std::fill(v.begin(), v.end(), 0.0);
        v[k + 1] = a(k + 1, k) - alpha;
        for (std::size_t i = k + 2; i < n; ++i) v[i] = a(i, k);
        double vnorm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vnorm2 += v[i] * v[i];
        if (vnorm2 == 0.0) continue;
        const double beta = 2.0 / vnorm2;
        // A <- (I - beta v v^T) A
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) s += v[i] * a(i, j);
            s *= beta;
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
        }
        // A <- A (I - beta v v^T)
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
            s *= beta;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * v[j];
        }
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
    return a;
}

ComplexSpectrum eigenvalues(const DenseMatrix& input) {
    if (!input.square()) throw std::invalid_argument("eigenvalues: matrix must be square");
    if (!all_finite(input.entries())) throw std::invalid_argument("eigenvalues: non-finite entries");
    const std::size_t n = input.rows();
    if (n == 0) return {};
    if (n == 1) return ComplexSpectrum{{Complex(input(0, 0), 0.0)}};
    DenseMatrix a = input;
    balance(a);
    a = hessenberg(a);
    return hessenberg_qr(a);
}

ComplexVector eigenvector(const DenseMatrix& a, Complex lambda) {
    const std::size_t n = a.rows();
    const double scale = std::max(1.0, norm_inf(a));
    // Shift slightly off the eigenvalue so the factorization stays regular.
    const Complex shift = lambda + Complex(1e-10 * scale, 1e-10 * scale);
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = Complex(a(i, j), 0.0) - (i == j ? shift : Complex{});
    std::optional<LuFactorization<Complex>> lu;
    for (double bump = 1e-10; !lu; bump *= 100.0) {
        try {
            lu.emplace(m);
        } catch (const SingularMatrixError&) {
            if (bump > 1e-4) throw;
            for (std::size_t i = 0; i < n; ++i) m(i, i) -= Complex(bump * scale, 0.0);
        }
    }
    ComplexVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = Complex(1.0 + 0.1 * static_cast<double>(i % 7), 0.3);
    for (int it = 0; it < 4; ++it) {
        v = lu->solve(v);
        double norm = 0.0;
        for (const auto& c : v) norm += std::norm(c);
        norm = std::sqrt(norm);
        if (!(norm > 0.0) || !std::isfinite(norm)) throw ConvergenceError("eigenvector: inverse iteration failed");
        for (auto& c : v) c /= norm;
    }
    return v;
}

Vector participation(const DenseMatrix& a, Complex lambda) {
    const ComplexVector right = eigenvector(a, lambda);
    const ComplexVector left = eigenvector(a.transposed(), lambda);
    Vector p(a.rows());
    double total = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        p[k] = std::abs(left[k] * right[k]);
        total += p[k];
    }
    if (total > 0.0)
        for (auto& x : p) x /= total;
    return p;
}

}  // namespace tsclab::numerics
