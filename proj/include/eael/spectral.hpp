#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "eael/closed_form.hpp"
#include "eael/eigen.hpp"
#include "eael/matrix.hpp"
#include "eael/model.hpp"
#include "eael/power_factors.hpp"

namespace eael {

namespace detail {

// Right eigenvector of an upper-triangular matrix for its k-th diagonal
// entry (1-based), via back substitution. Unit entry at position k,
// support on 1..k.
inline Vec triangular_eigenvector(const Matrix& a, int k) {
    const int n = static_cast<int>(a.rows());
    Vec v(n, 0.0);
    v[k - 1] = 1.0;
    const double lam = a(k - 1, k - 1);
    for (int i = k - 1; i >= 1; --i) {
        double s = 0.0;
        for (int j = i + 1; j <= k; ++j) s += a(i - 1, j - 1) * v[j - 1];
        v[i - 1] = s / (lam - a(i - 1, i - 1));
    }
    return v;
}

inline void append_term(ClosedFormError& cf, double c, double lambda, int d, int s) {
    cf.terms.push_back(ClosedFormTerm{c, lambda, d, s});
}

} // namespace detail

/// Closed form e[t] = sum_i c_i * lambda_i^t for a chain whose matrix is
/// diagonal, symmetric, or upper triangular with pairwise-distinct
/// diagonal — the three classes this routine certifies as diagonalizable.
/// Valid at every t >= 0.
inline ClosedFormError diagonalizable_closed_form(const TransitionModel& m, const Distribution& p0) {
    const int L = m.dim();
    if (p0.p.size() != static_cast<std::size_t>(L))
        throw std::invalid_argument("diagonalizable_closed_form: distribution size mismatch");
    const Vec e = nonoptimal_errors(m);
    ClosedFormError cf;

    if (is_diagonal(m.R)) {
        for (int i = 0; i < L; ++i)
            detail::append_term(cf, e[i] * p0.p[i], m.R(i, i), 0, 0);
        return cf;
    }
    if (is_symmetric(m.R)) {
        const SymmetricEigen se = jacobi_symmetric_eigen(m.R);
        // R = V diag V^T with orthonormal V: coefficients split as
        // (e^T v_i)(v_i^T p0).
        for (int i = 0; i < L; ++i) {
            double a = 0.0, b = 0.0;
            for (int k = 0; k < L; ++k) {
                a += e[k] * se.V(k, i);
                b += se.V(k, i) * p0.p[k];
            }
            detail::append_term(cf, a * b, se.values[i], 0, 0);
        }
        return cf;
    }
    if (is_upper_triangular(m.R)) {
        for (int i = 1; i <= L; ++i)
            for (int j = i + 1; j <= L; ++j)
                if (std::abs(m.R(i - 1, i - 1) - m.R(j - 1, j - 1)) <= 1e-9)
                    throw std::invalid_argument(
                        "diagonalizable_closed_form: duplicate diagonal entries " +
                        std::to_string(i) + " and " + std::to_string(j) +
                        " in triangular matrix");
        // Columns of V are the eigenvectors; V is unit upper triangular.
        Matrix V(L, L);
        for (int k = 1; k <= L; ++k) {
            const Vec v = detail::triangular_eigenvector(m.R, k);
            for (int i = 0; i < L; ++i) V(i, k - 1) = v[i];
        }
        const Vec b = solve_upper_triangular(V, p0.p);  // V b = p0
        for (int k = 0; k < L; ++k) {
            double a = 0.0;
            for (int i = 0; i < L; ++i) a += e[i] * V(i, k);
            detail::append_term(cf, a * b[k], m.R(k, k), 0, 0);
        }
        return cf;
    }
    throw std::invalid_argument(
        "diagonalizable_closed_form: matrix is neither diagonal, symmetric, "
        "nor triangular with distinct diagonal");
}

/// Closed form from the power factors of an upper-triangular chain:
///   e[t] = sum_k C_k * lambda_k^(t-1)  for t >= 1, with
///   C_k = sum_{i<=k<=j} e_i * factor(i,j,k) * p0_j.
/// The t-1 powers do not determine the value at t = 0 once a zero diagonal
/// entry is involved, so a rate-zero balancing term (nonzero only at t = 0)
/// is appended to make evaluation exact at every t >= 0.
inline ClosedFormError triangular_closed_form(const TransitionModel& m, const Distribution& p0) {
    const int L = m.dim();
    if (p0.p.size() != static_cast<std::size_t>(L))
        throw std::invalid_argument("triangular_closed_form: distribution size mismatch");
    const Vec e = nonoptimal_errors(m);
    const PowerFactorTensor pf = power_factors(m.R);

    ClosedFormError cf;
    for (int k = 1; k <= L; ++k) {
        double c = 0.0;
        for (int i = 1; i <= k; ++i)
            for (int j = k; j <= L; ++j)
                c += e[i - 1] * pf.at(i, j, k) * p0.p[j - 1];
        detail::append_term(cf, c, pf.diag[k - 1], 0, 1);
    }
    const double at0 = evaluate_closed_form(cf, 0);
    const double want0 = dot(e, p0.p);
    if (at0 != want0) detail::append_term(cf, want0 - at0, 0.0, 0, 0);
    return cf;
}

/// One Jordan block: eigenvalue and size.
struct JordanBlock {
    double lambda = 0.0;
    int size = 1;
};

/// Caller-supplied Jordan data R = Q_inv * J * Q. The pair (Q, Q_inv) is
/// trusted after a residual check; no numerical Jordan decomposition is
/// attempted here (it is famously ill-posed).
struct JordanStructure {
    std::vector<JordanBlock> blocks;
    Matrix Q;
    Matrix Q_inv;

    int dim() const {
        int n = 0;
        for (const auto& b : blocks) n += b.size;
        return n;
    }
};

inline JordanStructure jordan_from_diagonal(const Vec& diag) {
    JordanStructure js;
    for (double lam : diag) js.blocks.push_back(JordanBlock{lam, 1});
    js.Q = Matrix::identity(diag.size());
    js.Q_inv = Matrix::identity(diag.size());
    return js;
}

inline void validate_jordan_structure(const JordanStructure& js) {
    const int n = js.dim();
    if (n <= 0) throw std::invalid_argument("jordan: empty block list");
    for (const auto& b : js.blocks)
        if (b.size < 1) throw std::invalid_argument("jordan: block size must be >= 1");
    if (static_cast<int>(js.Q.rows()) != n || static_cast<int>(js.Q.cols()) != n ||
        static_cast<int>(js.Q_inv.rows()) != n || static_cast<int>(js.Q_inv.cols()) != n)
        throw std::invalid_argument("jordan: Q/Q_inv shape mismatch with blocks");
    const double resid = max_abs_diff(multiply(js.Q, js.Q_inv), Matrix::identity(n));
    if (!(resid < 1e-8))
        throw std::invalid_argument("jordan: Q * Q_inv deviates from identity by " +
                                    std::to_string(resid));
}

/// Closed form through a supplied Jordan structure. Within one block of
/// size S, the t-th power has entry C(t, q) * lambda^(t-q) on offset
/// q = 0..S-1, so collecting a^T J^t b by offset gives terms
///   (sum_j a_j b_{j+q}) * C(t, q) * lambda^(t-q),
/// i.e. binom_degree == shift == q. Valid at every t >= 0.
inline ClosedFormError jordan_closed_form(const JordanStructure& js, const Vec& e, const Vec& p0) {
    validate_jordan_structure(js);
    const int n = js.dim();
    if (static_cast<int>(e.size()) != n || static_cast<int>(p0.size()) != n)
        throw std::invalid_argument("jordan_closed_form: vector size mismatch");

    Vec a(n, 0.0), b(n, 0.0);  // a^T = e^T Q_inv, b = Q p0
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) a[j] += e[i] * js.Q_inv(i, j);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b[i] += js.Q(i, j) * p0[j];

    ClosedFormError cf;
    int off = 0;
    for (const auto& blk : js.blocks) {
        for (int q = 0; q < blk.size; ++q) {
            double c = 0.0;
            for (int j = 0; j + q < blk.size; ++j) c += a[off + j] * b[off + j + q];
            detail::append_term(cf, c, blk.lambda, q, q);
        }
        off += blk.size;
    }
    return cf;
}

/// Entry (i, j) of the t-th power of an upper-triangular matrix by direct
/// enumeration: sum over strictly increasing index paths from i to j and,
/// per path, over the ways to spend the remaining t-m steps waiting on the
/// visited diagonal entries. Exponential in size — a cross-check oracle,
/// capped at L <= 6, t <= 12.
inline double schur_entry_oracle(const Matrix& a, int i, int j, int t) {
    const int L = static_cast<int>(a.rows());
    if (a.cols() != a.rows()) throw std::invalid_argument("schur_entry_oracle: not square");
    if (!is_upper_triangular(a))
        throw std::invalid_argument("schur_entry_oracle: matrix is not upper triangular");
    if (L > 6) throw std::invalid_argument("schur_entry_oracle: capped at L <= 6");
    if (t < 0 || t > 12) throw std::invalid_argument("schur_entry_oracle: capped at 0 <= t <= 12");
    if (i < 1 || j < 1 || i > L || j > L) throw std::out_of_range("schur_entry_oracle: bad indices");

    if (i > j) return 0.0;
    if (i == j) return std::pow(a(i - 1, i - 1), t);

    // Sum over ways to distribute `left` waiting steps across the visited
    // states: each split contributes the product of diagonal powers.
    struct Rec {
        static double waits(const std::vector<int>& path, const Matrix& a, std::size_t pos, int left) {
            const double lam = a(path[pos] - 1, path[pos] - 1);
            if (pos + 1 == path.size()) return std::pow(lam, left);
            double s = 0.0;
            double pw = 1.0;  // lam^used
            for (int used = 0; used <= left; ++used) {
                s += pw * waits(path, a, pos + 1, left - used);
                pw *= lam;
            }
            return s;
        }
    };

    std::vector<int> path{i};
    double total = 0.0;
    // Depth-first over strictly increasing paths; acc carries the product
    // of the off-diagonal steps taken so far.
    auto dfs = [&](auto&& self, double acc) -> void {
        const int cur = path.back();
        for (int next = cur + 1; next <= j; ++next) {
            const double w = acc * a(cur - 1, next - 1);
            path.push_back(next);
            if (next == j) {
                const int m = static_cast<int>(path.size()) - 1;  // jumps taken
                if (t - m >= 0 && w != 0.0) total += w * Rec::waits(path, a, 0, t - m);
            } else if (w != 0.0) {
                self(self, w);
            }
            path.pop_back();
        }
    };
    dfs(dfs, 1.0);
    return total;
}

} // namespace eael
