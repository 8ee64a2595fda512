#pragma once

#include <cmath>
#include <stdexcept>

#include "eael/matrix.hpp"

namespace eael {

/// Eigendecomposition A = V diag(values) V^T of a symmetric matrix.
struct SymmetricEigen {
    Vec values;
    Matrix V;  // columns are orthonormal eigenvectors
};

/// Cyclic Jacobi rotations. Plenty accurate for the sizes used here
/// (a few hundred states); converges in a handful of sweeps.
inline SymmetricEigen jacobi_symmetric_eigen(const Matrix& a_in, int max_sweeps = 64) {
    const std::size_t n = a_in.rows();
    if (a_in.cols() != n) throw std::invalid_argument("jacobi: not square");
    Matrix a = a_in;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = 0.5 * (a(i, j) + a(j, i));  // kill stray asymmetry
            a(i, j) = a(j, i) = s;
        }
    Matrix v = Matrix::identity(n);

    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) norm += a(i, j) * a(i, j);
    norm = std::sqrt(norm);
    const double stop = 1e-15 * std::max(norm, 1e-300);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (std::sqrt(2.0 * off) <= stop) break;

        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }

    SymmetricEigen out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
    out.V = std::move(v);
    return out;
}

/// Dominant-eigenvalue estimate for an entrywise non-negative matrix via
/// power iteration from a positive start, run to 1e-12 relative stagnation.
/// Returns the eigenvalue; if vec_out is given, also the (L1-normalized,
/// non-negative) dominant eigenvector.
inline double power_iteration(const Matrix& a, Vec* vec_out = nullptr,
                              double rel_tol = 1e-12, long max_iters = 2000000) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("power_iteration: not square");
    Vec x(n, 1.0 / n);
    double lam = 0.0;
    for (long it = 0; it < max_iters; ++it) {
        Vec y = mat_vec(a, x);
        double s = 0.0;
        for (double v : y) s += std::abs(v);
        if (s == 0.0) {  // reached the kernel: spectral radius 0
            if (vec_out) *vec_out = x;
            return 0.0;
        }
        for (double& v : y) v /= s;
        const double prev = lam;
        lam = s;
        x = std::move(y);
        if (it > 0 && std::abs(lam - prev) <= rel_tol * std::max(1.0, std::abs(lam))) {
            // polish: a few extra iterations tighten the eigenvector
            for (int extra = 0; extra < 3; ++extra) {
                Vec z = mat_vec(a, x);
                double zs = 0.0;
                for (double v : z) zs += std::abs(v);
                if (zs == 0.0) break;
                for (double& v : z) v /= zs;
                lam = zs;
                x = std::move(z);
            }
            break;
        }
    }
    if (vec_out) *vec_out = x;
    return lam;
}

} // namespace eael
