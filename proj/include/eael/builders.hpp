#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include "eael/model.hpp"

namespace eael {

enum class Problem { OneMax, Needle, LeadingOnes, Mono };
enum class Algo { OBSE, BWSE, BWNE };

/// One-bit / bitwise mutation parameters of a pseudo-Boolean instance.
/// mono_f must be strictly increasing on {0..n} when problem == Mono.
struct ProblemSpec {
    Problem problem = Problem::OneMax;
    Algo algo = Algo::OBSE;
    int n = 0;
    std::function<double(int)> mono_f;  // Mono only: fitness of |x| = k
};

inline double mono_identity(int k) { return static_cast<double>(k); }
inline double mono_square(int k) { return static_cast<double>(k) * k; }
inline double mono_log(int k) { return std::log(static_cast<double>(k) + 1.0); }

namespace detail {

inline void require_n(int n, int cap, const char* who) {
    if (n < 1) throw std::invalid_argument(std::string(who) + ": n must be >= 1");
    if (cap > 0 && n > cap)
        throw std::invalid_argument(std::string(who) + ": n capped at " + std::to_string(cap));
}

// Probability that a bitwise mutation with rate 1/n flips exactly the k
// chosen bits of a fixed set and nothing else: (1/n)^k (1-1/n)^(n-k).
inline double flip_mass(int n, int k) {
    const double p = 1.0 / n;
    return std::pow(p, k) * std::pow(1.0 - p, n - k);
}

inline double binom_exact(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
    return v;
}

} // namespace detail

/// OneMax solved by one-bit mutation with strict selection. Level i holds
/// the strings with i zeros; the only accepted move flips one of them.
inline TransitionModel build_onemax_obse(int n) {
    detail::require_n(n, 0, "build_onemax_obse");
    Vec fit(n + 1);
    for (int i = 0; i <= n; ++i) fit[i] = static_cast<double>(n - i);
    TransitionModel m{make_levels(std::move(fit)), Matrix(n, n), Vec(n, 0.0)};
    for (int j = 1; j <= n; ++j) {
        m.R(j - 1, j - 1) = 1.0 - static_cast<double>(j) / n;
        if (j >= 2) m.R(j - 2, j - 1) = static_cast<double>(j) / n;
    }
    m.r[0] = 1.0 / n;
    return m;
}

/// Monotone transform of OneMax under one-bit mutation. Selection only
/// compares fitness order, so the transition structure matches OneMax;
/// only the level errors change.
inline TransitionModel build_mono_obse(int n, const std::function<double(int)>& f) {
    detail::require_n(n, 0, "build_mono_obse");
    if (!f) throw std::invalid_argument("build_mono_obse: missing fitness transform");
    for (int k = 0; k < n; ++k)
        if (!(f(k) < f(k + 1)))
            throw std::invalid_argument("build_mono_obse: transform not strictly increasing");
    TransitionModel m = build_onemax_obse(n);
    Vec fit(n + 1);
    for (int i = 0; i <= n; ++i) fit[i] = f(n - i);
    m.levels = make_levels(std::move(fit));
    return m;
}

/// Needle-in-a-haystack under bitwise mutation with strict selection.
/// Every non-optimal string is fitness 0, so nothing is ever accepted
/// except the jump onto the needle: the level chain is diagonal.
inline TransitionModel build_needle_bwse(int n) {
    detail::require_n(n, 0, "build_needle_bwse");
    Vec fit(n + 1, 0.0);
    fit[0] = 1.0;
    TransitionModel m{make_levels(std::move(fit)), Matrix(n, n), Vec(n, 0.0)};
    for (int i = 1; i <= n; ++i) {
        const double esc = detail::flip_mass(n, i);
        m.r[i - 1] = esc;
        m.R(i - 1, i - 1) = 1.0 - esc;
    }
    return m;
}

/// Needle under bitwise mutation with non-strict selection. Every offspring
/// ties or wins, so every mutation is accepted and the chain runs over all
/// 2^n - 1 non-optimal strings; level index = integer value of the string.
/// The resulting matrix is symmetric because flip distance is.
inline TransitionModel build_needle_bwne(int n) {
    detail::require_n(n, 10, "build_needle_bwne");
    const int L = (1 << n) - 1;
    Vec fit(L + 1, 0.0);
    fit[0] = 1.0;
    TransitionModel m{make_levels(std::move(fit)), Matrix(L, L), Vec(L, 0.0)};
    for (int j = 1; j <= L; ++j) {
        m.r[j - 1] = detail::flip_mass(n, std::popcount(static_cast<unsigned>(j)));
        for (int i = 1; i <= L; ++i) {
            const int h = std::popcount(static_cast<unsigned>(i ^ j));
            m.R(i - 1, j - 1) = detail::flip_mass(n, h);
        }
    }
    return m;
}

/// OneMax under bitwise mutation with strict selection, lumped by the
/// number of zeros. From level j, flipping a zeros to one and b ones to
/// zero lands on level j - a + b; only strictly better offspring (a > b)
/// are accepted, which keeps the chain upper triangular.
inline TransitionModel build_onemax_bwse(int n) {
    detail::require_n(n, 20, "build_onemax_bwse");
    Vec fit(n + 1);
    for (int i = 0; i <= n; ++i) fit[i] = static_cast<double>(n - i);
    TransitionModel m{make_levels(std::move(fit)), Matrix(n, n), Vec(n, 0.0)};
    for (int j = 1; j <= n; ++j) {
        double gain = 0.0;
        for (int k = 0; k < j; ++k) {
            const int d = j - k;  // net number of repaired zeros
            double prob = 0.0;
            for (int b = 0; b + d <= j && b <= n - j; ++b) {
                const int a = b + d;
                prob += detail::binom_exact(j, a) * detail::binom_exact(n - j, b) *
                        detail::flip_mass(n, a + b);
            }
            if (k == 0) m.r[j - 1] = prob;
            else m.R(k - 1, j - 1) = prob;
            gain += prob;
        }
        m.R(j - 1, j - 1) = 1.0 - gain;
    }
    return m;
}

/// Builds the exact level chain for a spec, or explains why none exists.
inline TransitionModel build_model(const ProblemSpec& s) {
    switch (s.problem) {
        case Problem::OneMax:
            if (s.algo == Algo::OBSE) return build_onemax_obse(s.n);
            if (s.algo == Algo::BWSE) return build_onemax_bwse(s.n);
            throw std::invalid_argument("build_model: onemax supports obse and bwse");
        case Problem::Mono:
            if (s.algo == Algo::OBSE) return build_mono_obse(s.n, s.mono_f);
            throw std::invalid_argument("build_model: mono supports obse only");
        case Problem::Needle:
            if (s.algo == Algo::BWSE) return build_needle_bwse(s.n);
            if (s.algo == Algo::BWNE) return build_needle_bwne(s.n);
            throw std::invalid_argument("build_model: needle supports bwse and bwne");
        case Problem::LeadingOnes:
            throw std::invalid_argument(
                "build_model: leadingones has no exact level chain here; use "
                "'simulate' for empirical trajectories or 'bound rate-analytic' "
                "for its convergence bound");
    }
    throw std::invalid_argument("build_model: unknown problem");
}

} // namespace eael
