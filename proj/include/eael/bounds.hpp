#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eael/builders.hpp"
#include "eael/closed_form.hpp"
#include "eael/eigen.hpp"
#include "eael/matrix.hpp"
#include "eael/model.hpp"
#include "eael/power_factors.hpp"

namespace eael {

enum class BoundProvenance { RateBound, AuxiliaryRate, Analytic, TrivialMax };

/// Geometric upper bound on the expected error: value(t) = base * rate^t.
/// The base is the initial expected error of whatever start the bound is
/// applied to.
struct BoundExpression {
    double rate = 1.0;
    BoundProvenance provenance = BoundProvenance::RateBound;

    double value(double initial, int t) const { return initial * std::pow(rate, t); }
};

/// Expected one-step decrease of the error from level i (1-based):
/// current error minus the mean error after one generation.
inline double drift(const TransitionModel& m, int i) {
    const int L = m.dim();
    if (i < 1 || i > L) throw std::invalid_argument("drift: level out of range");
    const Vec e = nonoptimal_errors(m);
    double next = 0.0;
    for (int k = 0; k < L; ++k) next += m.R(k, i - 1) * e[k];
    return e[i - 1] - next;
}

/// Worst-case-ratio geometric bound: rate = 1 - min_i drift(i)/e(i).
/// Requires strictly positive drift everywhere; a level that cannot make
/// progress in expectation (a plateau) is reported by index instead of
/// silently producing a useless rate.
inline BoundExpression rate_bound(const TransitionModel& m) {
    const int L = m.dim();
    const Vec e = nonoptimal_errors(m);
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= L; ++i) {
        const double ratio = drift(m, i) / e[i - 1];
        if (!(ratio > 0.0))
            throw std::invalid_argument(
                "rate_bound: level " + std::to_string(i) +
                " has non-positive expected progress; the geometric bound does "
                "not apply (see trivial_error_bound for the flat fallback)");
        worst = std::min(worst, ratio);
    }
    return BoundExpression{1.0 - worst, BoundProvenance::RateBound};
}

/// Flat fallback when no geometric rate exists: the error never exceeds
/// the largest level error of an elitist chain.
inline double trivial_error_bound(const TransitionModel& m) {
    return m.levels.error.back();
}

/// Known problem-specific rates for bitwise mutation with strict selection.
inline BoundExpression analytic_rate_bound(Problem problem, Algo algo, int n) {
    if (n < 1) throw std::invalid_argument("analytic_rate_bound: n must be >= 1");
    if (algo != Algo::BWSE)
        throw std::invalid_argument("analytic_rate_bound: only the bwse variant is covered");
    const double en = std::exp(1.0) * n;
    if (problem == Problem::OneMax)
        return BoundExpression{1.0 - 1.0 / en, BoundProvenance::Analytic};
    if (problem == Problem::LeadingOnes)
        return BoundExpression{1.0 - 1.0 / (en * n), BoundProvenance::Analytic};
    throw std::invalid_argument("analytic_rate_bound: covered problems are onemax and leadingones");
}

/// Largest eigenvalue magnitude. Triangular matrices read it off the
/// diagonal, symmetric ones go through the full eigensolver, anything else
/// falls back to power iteration (fine for non-negative matrices).
inline double spectral_radius(const Matrix& r) {
    if (r.rows() != r.cols()) throw std::invalid_argument("spectral_radius: not square");
    if (r.rows() == 0) return 0.0;
    if (is_upper_triangular(r)) {
        double m = 0.0;
        for (std::size_t i = 0; i < r.rows(); ++i) m = std::max(m, std::abs(r(i, i)));
        return m;
    }
    if (is_symmetric(r)) {
        const SymmetricEigen se = jacobi_symmetric_eigen(r);
        double m = 0.0;
        for (double v : se.values) m = std::max(m, std::abs(v));
        return m;
    }
    return power_iteration(r);
}

/// Start distribution proportional to the dominant eigenvector, so that
/// the error decays by exactly the spectral radius each generation.
/// Diagonal chains average the tied maxima, triangular ones use exact back
/// substitution, everything else power iteration. Rejects eigenvectors
/// with mixed signs (no distribution exists in that case).
inline Distribution eigen_initial_distribution(const TransitionModel& m) {
    const int L = m.dim();
    Vec v;
    if (is_diagonal(m.R)) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < L; ++i) mx = std::max(mx, m.R(i, i));
        v.assign(L, 0.0);
        int ties = 0;
        for (int i = 0; i < L; ++i)
            if (m.R(i, i) >= mx - 1e-14 * std::max(1.0, std::abs(mx))) { v[i] = 1.0; ++ties; }
        for (double& x : v) x /= ties;
        return Distribution{v};
    }
    if (is_upper_triangular(m.R)) {
        int k = 1;
        for (int i = 2; i <= L; ++i)
            if (m.R(i - 1, i - 1) > m.R(k - 1, k - 1)) k = i;
        bool unique = true;
        for (int i = 1; i <= L && unique; ++i)
            if (i != k && std::abs(m.R(i - 1, i - 1) - m.R(k - 1, k - 1)) <= 1e-12) unique = false;
        if (unique) {
            v.assign(L, 0.0);
            v[k - 1] = 1.0;
            const double lam = m.R(k - 1, k - 1);
            for (int i = k - 1; i >= 1; --i) {
                double s = 0.0;
                for (int j = i + 1; j <= k; ++j) s += m.R(i - 1, j - 1) * v[j - 1];
                v[i - 1] = s / (lam - m.R(i - 1, i - 1));
            }
        }
    }
    if (v.empty()) power_iteration(m.R, &v, 1e-14);

    double pos = 0.0, neg = 0.0;
    for (double x : v) (x >= 0 ? pos : neg) = std::max(x >= 0 ? pos : neg, std::abs(x));
    if (neg > 1e-10 * std::max(pos, 1e-300))
        throw std::invalid_argument(
            "eigen_initial_distribution: dominant eigenvector has mixed signs; "
            "no eigen-aligned start distribution exists");
    double sum = 0.0;
    for (double& x : v) { x = std::max(x, 0.0); sum += x; }
    if (sum <= 0.0) throw std::invalid_argument("eigen_initial_distribution: zero eigenvector");
    for (double& x : v) x /= sum;
    return Distribution{v};
}

/// Mean per-generation shrink factor over the first t generations,
/// 1 - (e[t]/e[0])^(1/t).
inline double average_convergence_rate(const ErrorTrajectory& tr, int t) {
    if (t < 1 || t >= static_cast<int>(tr.values.size()))
        throw std::invalid_argument("average_convergence_rate: t out of range");
    const double e0 = tr.values[0];
    if (!(e0 > 0.0)) throw std::invalid_argument("average_convergence_rate: e[0] must be positive");
    return 1.0 - std::pow(tr.values[t] / e0, 1.0 / t);
}

/// Unit upper-triangular matrix of ones; left-multiplying by it turns a
/// column of level masses into tail sums.
inline Matrix hat_T(int L) {
    Matrix t(L, L);
    for (int i = 0; i < L; ++i)
        for (int j = i; j < L; ++j) t(i, j) = 1.0;
    return t;
}

struct DominanceViolation {
    int t = 0;
    int row = 0, col = 0;  // 1-based
    double lhs = 0.0, rhs = 0.0;
};

/// Result of comparing tail sums of two chains' powers generation by
/// generation: holds == true means the primed chain keeps at least as much
/// mass on every tail at every checked horizon.
struct DominanceReport {
    bool holds = true;
    std::optional<DominanceViolation> first_violation;
    int t_checked = 0;
};

/// Checks hatT * Bp^t >= hatT * B^t entrywise for t = 0..t_max with slack
/// 1e-12, reporting the first offending entry.
inline DominanceReport dominance_check(const Matrix& bp, const Matrix& b, int t_max) {
    if (!bp.same_shape(b) || bp.rows() != bp.cols())
        throw std::invalid_argument("dominance_check: shape mismatch");
    const int L = static_cast<int>(bp.rows());
    const Matrix T = hat_T(L);
    Matrix pp = Matrix::identity(L), pw = Matrix::identity(L);
    DominanceReport rep;
    for (int t = 0; t <= t_max; ++t) {
        if (t > 0) { pp = multiply(bp, pp); pw = multiply(b, pw); }
        const Matrix lhs = multiply(T, pp), rhs = multiply(T, pw);
        for (int i = 0; i < L; ++i)
            for (int j = 0; j < L; ++j)
                if (lhs(i, j) < rhs(i, j) - 1e-12) {
                    rep.holds = false;
                    rep.first_violation = DominanceViolation{t, i + 1, j + 1, lhs(i, j), rhs(i, j)};
                    rep.t_checked = t;
                    return rep;
                }
        rep.t_checked = t;
    }
    return rep;
}

/// One-shot sufficient condition for dominance at every horizon:
/// hatT*Bp >= hatT*B and hatT*Bp*hatT^{-1} >= 0 entrywise.
struct SufficientCheck {
    bool holds = false;
    bool tail_step_ok = false;   // hatT Bp >= hatT B
    bool tail_monotone_ok = false;  // hatT Bp hatT^{-1} >= 0
    std::string detail;
};

inline SufficientCheck slower_sufficient_check(const Matrix& bp, const Matrix& b) {
    if (!bp.same_shape(b) || bp.rows() != bp.cols())
        throw std::invalid_argument("slower_sufficient_check: shape mismatch");
    const int L = static_cast<int>(bp.rows());
    const Matrix T = hat_T(L);
    SufficientCheck out;
    out.tail_step_ok = true;
    out.tail_monotone_ok = true;

    const Matrix tp = multiply(T, bp), tb = multiply(T, b);
    for (int i = 0; i < L && out.tail_step_ok; ++i)
        for (int j = 0; j < L; ++j)
            if (tp(i, j) < tb(i, j) - 1e-12) {
                out.tail_step_ok = false;
                out.detail = "tail mass after one step drops at entry (" +
                             std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
                break;
            }

    // hatT^{-1} has ones on the diagonal and -1 just above it.
    Matrix tinv(L, L);
    for (int i = 0; i < L; ++i) {
        tinv(i, i) = 1.0;
        if (i + 1 < L) tinv(i, i + 1) = -1.0;
    }
    const Matrix tm = multiply(tp, tinv);
    for (int i = 0; i < L && out.tail_monotone_ok; ++i)
        for (int j = 0; j < L; ++j)
            if (tm(i, j) < -1e-12) {
                out.tail_monotone_ok = false;
                if (!out.detail.empty()) out.detail += "; ";
                out.detail += "tail sums not monotone across levels at entry (" +
                              std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
                break;
            }
    out.holds = out.tail_step_ok && out.tail_monotone_ok;
    return out;
}

namespace detail {

// Full (L+1) x (L+1) chain matrix with the optimum as row/column 0.
inline Matrix full_chain(const TransitionModel& m) {
    const int L = m.dim();
    Matrix p(L + 1, L + 1);
    p(0, 0) = 1.0;
    for (int j = 1; j <= L; ++j) {
        p(0, j) = m.r[j - 1];
        for (int i = 1; i <= L; ++i) p(i, j) = m.R(i - 1, j - 1);
    }
    return p;
}

} // namespace detail

/// Per-condition outcome of the triangular comparison test.
struct TriangularSlowerCheck {
    bool holds = false;
    bool diag_ok = false;        // primed chain waits at least as much on each level
    bool head_mass_ok = false;   // strictly-better mass never grows under priming
    bool column_monotone_ok = false;  // primed head mass shrinks with worse columns
    std::string detail;
};

/// Column-wise sufficient conditions for the primed chain being slower,
/// checked on the full matrices including the optimum row. Both chains
/// must be upper triangular (elitist).
inline TriangularSlowerCheck triangular_slower_check(const TransitionModel& primed,
                                                     const TransitionModel& base) {
    if (primed.dim() != base.dim())
        throw std::invalid_argument("triangular_slower_check: dimension mismatch");
    const int L = base.dim();
    const Matrix pp = detail::full_chain(primed);
    const Matrix pb = detail::full_chain(base);
    if (!is_upper_triangular(pp, 1e-12) || !is_upper_triangular(pb, 1e-12))
        throw std::invalid_argument("triangular_slower_check: chains must be upper triangular");

    TriangularSlowerCheck out;
    out.diag_ok = out.head_mass_ok = out.column_monotone_ok = true;

    for (int j = 0; j <= L; ++j)
        if (pp(j, j) < pb(j, j) - 1e-12) {
            out.diag_ok = false;
            out.detail = "level " + std::to_string(j) + " waits less in the primed chain";
            break;
        }
    for (int j = 1; j <= L && out.head_mass_ok; ++j)
        for (int i = 1; i < j; ++i) {
            double s = 0.0;
            for (int l = 0; l <= i - 1; ++l) s += pb(l, j) - pp(l, j);
            if (s < -1e-12) {
                out.head_mass_ok = false;
                if (!out.detail.empty()) out.detail += "; ";
                out.detail += "primed chain moves more mass above level " + std::to_string(i) +
                              " from level " + std::to_string(j);
                break;
            }
        }
    for (int j = 2; j <= L && out.column_monotone_ok; ++j)
        for (int i = 0; i < j - 1; ++i) {
            double s = 0.0;
            for (int l = 0; l <= i; ++l) s += pp(l, j - 1) - pp(l, j);
            if (s < -1e-12) {
                out.column_monotone_ok = false;
                if (!out.detail.empty()) out.detail += "; ";
                out.detail += "primed head mass grows from column " + std::to_string(j - 1) +
                              " to " + std::to_string(j) + " above level " + std::to_string(i);
                break;
            }
        }
    out.holds = out.diag_ok && out.head_mass_ok && out.column_monotone_ok;
    return out;
}

/// Total probability of strict improvement from each level (1-based index
/// j stored at [j-1]): the largest admissible one-step-up probability for
/// an auxiliary bidiagonal chain.
inline Vec improvement_mass(const TransitionModel& m) {
    const int L = m.dim();
    Vec up(L, 0.0);
    for (int j = 1; j <= L; ++j) {
        double s = m.r[j - 1];
        for (int i = 1; i < j; ++i) s += m.R(i - 1, j - 1);
        up[j - 1] = s;
    }
    return up;
}

/// Builds the comparison chain that moves up exactly one level with the
/// given probabilities and otherwise waits. Passing no probabilities picks
/// the maximal admissible choice (all improvement mass of the source).
/// Override values must stay positive and within the source's improvement
/// mass, or the slow-chain guarantee would be lost.
inline TransitionModel build_bidiagonal_auxiliary(const TransitionModel& m,
                                                  const Vec* up_override = nullptr) {
    const int L = m.dim();
    const Vec maximal = improvement_mass(m);
    Vec up = maximal;
    if (up_override) {
        if (static_cast<int>(up_override->size()) != L)
            throw std::invalid_argument("build_bidiagonal_auxiliary: override length mismatch");
        up = *up_override;
        for (int j = 0; j < L; ++j)
            if (up[j] > maximal[j] + 1e-12)
                throw std::invalid_argument(
                    "build_bidiagonal_auxiliary: override at level " + std::to_string(j + 1) +
                    " exceeds the improvement mass of the source chain");
    }
    for (int j = 0; j < L; ++j)
        if (!(up[j] > 0.0))
            throw std::invalid_argument(
                "build_bidiagonal_auxiliary: level " + std::to_string(j + 1) +
                " has zero improvement probability; the auxiliary chain would never converge");

    TransitionModel aux{m.levels, Matrix(L, L), Vec(L, 0.0)};
    aux.r[0] = up[0];
    aux.R(0, 0) = 1.0 - up[0];
    for (int j = 2; j <= L; ++j) {
        aux.R(j - 2, j - 1) = up[j - 1];
        aux.R(j - 1, j - 1) = 1.0 - up[j - 1];
    }
    return aux;
}

/// The textbook per-level one-bit-repair probabilities (j/n)(1-1/n)^(n-1)
/// for bitwise mutation over n bits, clamped to the source's improvement
/// mass where that would be exceeded (flat-fitness chains).
inline Vec bwse_onestep_up_probs(const TransitionModel& m) {
    const int n = m.dim();
    const Vec maximal = improvement_mass(m);
    Vec up(n);
    const double keep = std::pow(1.0 - 1.0 / n, n - 1);
    for (int j = 1; j <= n; ++j)
        up[j - 1] = std::min(static_cast<double>(j) / n * keep, maximal[j - 1]);
    return up;
}

/// Geometric bound through a verified slower chain: checks dominance, then
/// applies the drift rate of the auxiliary chain with the source's level
/// errors. Levels whose errors tie contribute zero auxiliary drift; the
/// bound then degrades to flat, which is still valid, so zero is allowed
/// here (unlike rate_bound, where it would be a plateau bug).
inline BoundExpression auxiliary_rate_bound(const TransitionModel& m, const TransitionModel& aux) {
    const TriangularSlowerCheck chk = triangular_slower_check(aux, m);
    if (!chk.holds)
        throw std::invalid_argument("auxiliary_rate_bound: dominance unverified: " + chk.detail);
    const int L = m.dim();
    const Vec e = nonoptimal_errors(m);
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= L; ++i) {
        const double ratio = drift(aux, i) / e[i - 1];
        if (ratio < -1e-12)
            throw std::invalid_argument("auxiliary_rate_bound: negative drift at level " +
                                        std::to_string(i));
        worst = std::min(worst, std::max(ratio, 0.0));
    }
    return BoundExpression{1.0 - worst, BoundProvenance::AuxiliaryRate};
}

/// Separates tied diagonal entries by adding k*eps0 to the k-th member of
/// each colliding group (first member untouched). eps0 <= 0 picks the
/// default 1e-9 * max diagonal. Off-diagonal entries are unchanged; the
/// result is generally no longer stochastic, which the bound algebra does
/// not need.
inline Matrix perturb_distinct(const Matrix& a, double eps0 = -1.0) {
    if (!is_upper_triangular(a))
        throw std::invalid_argument("perturb_distinct: matrix is not upper triangular");
    const int L = static_cast<int>(a.rows());
    double mx = 0.0;
    for (int i = 0; i < L; ++i) mx = std::max(mx, std::abs(a(i, i)));
    if (eps0 <= 0.0) eps0 = 1e-9 * std::max(mx, 1e-300);

    Matrix out = a;
    for (int attempt = 0; attempt < 60; ++attempt) {
        out = a;
        // group indices by value within the tie tolerance of power_factors
        std::vector<int> order(L);
        for (int i = 0; i < L; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](int x, int y) { return a(x, x) < a(y, y); });
        int gstart = 0;
        while (gstart < L) {
            int gend = gstart;
            while (gend + 1 < L &&
                   std::abs(a(order[gend + 1], order[gend + 1]) - a(order[gend], order[gend])) <= 1e-9)
                ++gend;
            for (int k = gstart + 1; k <= gend; ++k)
                out(order[k], order[k]) += (k - gstart) * eps0;
            gstart = gend + 1;
        }
        bool distinct = true;
        for (int i = 0; i < L && distinct; ++i)
            for (int j = i + 1; j < L; ++j)
                if (std::abs(out(i, i) - out(j, j)) <= 1e-9) { distinct = false; break; }
        if (distinct) return out;
        eps0 *= 4.0;  // collided across groups; spread further
    }
    throw std::runtime_error("perturb_distinct: could not separate diagonal entries");
}

/// Level-resolved geometric bound through a slower chain with distinct
/// rates: e[t] <= sum_k C'_k * lambda'_k^(t-1), built from the auxiliary
/// chain's power factors. Ties on the auxiliary diagonal are separated
/// with perturb_distinct(eps0) first (upward nudges keep the chain slower).
/// A rate-zero balancing term pins the t = 0 value to the initial error.
inline ClosedFormError power_factor_bound(const TransitionModel& m, const TransitionModel& aux,
                                          const Distribution& p0, double eps0 = -1.0) {
    const int L = m.dim();
    if (p0.p.size() != static_cast<std::size_t>(L))
        throw std::invalid_argument("power_factor_bound: distribution size mismatch");
    const TriangularSlowerCheck chk = triangular_slower_check(aux, m);
    if (!chk.holds)
        throw std::invalid_argument("power_factor_bound: dominance unverified: " + chk.detail);

    Matrix ra = aux.R;
    bool tied = false;
    for (int i = 0; i < L && !tied; ++i)
        for (int j = i + 1; j < L; ++j)
            if (std::abs(ra(i, i) - ra(j, j)) <= 1e-9) { tied = true; break; }
    if (tied) ra = perturb_distinct(ra, eps0);

    const PowerFactorTensor pf = power_factors(ra);
    const Vec e = nonoptimal_errors(m);
    ClosedFormError cf;
    for (int k = 1; k <= L; ++k) {
        double c = 0.0;
        for (int i = 1; i <= k; ++i)
            for (int j = k; j <= L; ++j)
                c += e[i - 1] * pf.at(i, j, k) * p0.p[j - 1];
        cf.terms.push_back(ClosedFormTerm{c, pf.diag[k - 1], 0, 1});
    }
    const double at0 = evaluate_closed_form(cf, 0);
    const double want0 = dot(e, p0.p);
    if (at0 != want0) cf.terms.push_back(ClosedFormTerm{want0 - at0, 0.0, 0, 0});
    return cf;
}

} // namespace eael
