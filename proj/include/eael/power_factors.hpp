#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "eael/matrix.hpp"

namespace eael {

/// Rank-one expansion coefficients of the powers of an upper-triangular
/// matrix A with pairwise-distinct diagonal: for every t >= 1,
///   (A^t)[i][j] = sum_k factor(i,j,k) * a_kk^(t-1),
/// with factor(i,j,k) supported on i <= k <= j. Indices are 1-based to
/// match standard triangular-matrix notation.
struct PowerFactorTensor {
    int L = 0;
    Vec diag;             // a_kk, 1-based via diag[k-1]
    std::vector<double> v;  // dense L^3 storage

    double at(int i, int j, int k) const {
        if (i < 1 || j < 1 || k < 1 || i > L || j > L || k > L)
            throw std::out_of_range("PowerFactorTensor::at: index out of range");
        return v[((i - 1) * static_cast<std::size_t>(L) + (j - 1)) * L + (k - 1)];
    }
    double& ref(int i, int j, int k) {
        return v[((i - 1) * static_cast<std::size_t>(L) + (j - 1)) * L + (k - 1)];
    }
};

/// Computes all power factors of an upper-triangular matrix by the
/// four-case recurrence, filling in order of growing column span so every
/// needed entry is ready. Near-equal diagonal entries make the division
/// blow up, so those are rejected with the colliding pair named; nudge the
/// diagonal apart (see perturb_distinct) or use the Jordan route instead.
inline PowerFactorTensor power_factors(const Matrix& a, double tie_tol = 1e-9) {
    const int L = static_cast<int>(a.rows());
    if (a.cols() != a.rows()) throw std::invalid_argument("power_factors: not square");
    if (!is_upper_triangular(a))
        throw std::invalid_argument("power_factors: matrix is not upper triangular");
    for (int i = 1; i <= L; ++i)
        for (int j = i + 1; j <= L; ++j)
            if (std::abs(a(i - 1, i - 1) - a(j - 1, j - 1)) <= tie_tol)
                throw std::invalid_argument(
                    "power_factors: diagonal entries " + std::to_string(i) + " and " +
                    std::to_string(j) + " coincide within " + std::to_string(tie_tol) +
                    "; perturb the diagonal or use the Jordan route");

    PowerFactorTensor pf;
    pf.L = L;
    pf.diag.resize(L);
    for (int k = 1; k <= L; ++k) pf.diag[k - 1] = a(k - 1, k - 1);
    pf.v.assign(static_cast<std::size_t>(L) * L * L, 0.0);

    for (int i = 1; i <= L; ++i) pf.ref(i, i, i) = a(i - 1, i - 1);
    for (int span = 1; span < L; ++span)
        for (int i = 1; i + span <= L; ++i) {
            const int j = i + span;
            // k strictly between the endpoints' roles: i <= k < j
            for (int k = i; k < j; ++k) {
                double s = 0.0;
                for (int l = k; l < j; ++l) s += pf.at(i, l, k) * a(l - 1, j - 1);
                pf.ref(i, j, k) = s / (a(k - 1, k - 1) - a(j - 1, j - 1));
            }
            // k == j soaks up the remainder so that t = 1 reproduces A
            double rest = a(i - 1, j - 1);
            for (int l = i; l < j; ++l) rest -= pf.at(i, j, l);
            pf.ref(i, j, j) = rest;
        }
    return pf;
}

/// Reference reconstruction of one entry of A^t from the factors.
inline double power_factor_entry(const PowerFactorTensor& pf, int i, int j, int t) {
    if (t < 1) throw std::invalid_argument("power_factor_entry: t must be >= 1");
    double s = 0.0;
    for (int k = i; k <= j; ++k)
        s += pf.at(i, j, k) * std::pow(pf.diag[k - 1], t - 1);
    return s;
}

} // namespace eael
