#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "eael/matrix.hpp"

namespace eael {

// Numeric tolerances shared across the library.
constexpr double kStochTol = 1e-12;   // column-stochasticity slack
constexpr double kEntryTol = 1e-12;   // probability-entry range slack

/// Fitness levels of a maximization problem, ranked best to worst.
/// Index 0 is the optimum; indices 1..L are the non-optimal levels.
/// error[i] is the absolute fitness gap |fitness[i] - fitness[0]|, and
/// the gaps must be non-decreasing in i (worse rank, larger gap).
struct LevelDecomposition {
    int L = 0;
    Vec fitness;   // size L+1, fitness[0] = optimal value
    Vec error;     // size L+1, error[0] = 0

    double f_opt() const { return fitness.empty() ? 0.0 : fitness[0]; }
};

/// Builds a LevelDecomposition from ranked fitness values (optimum first).
inline LevelDecomposition make_levels(Vec fitness_ranked) {
    LevelDecomposition lv;
    if (fitness_ranked.empty()) throw std::invalid_argument("make_levels: empty fitness vector");
    lv.L = static_cast<int>(fitness_ranked.size()) - 1;
    lv.fitness = std::move(fitness_ranked);
    lv.error.resize(lv.fitness.size());
    for (std::size_t i = 0; i < lv.fitness.size(); ++i)
        lv.error[i] = std::abs(lv.fitness[i] - lv.fitness[0]);
    return lv;
}

/// Absorbing chain over the non-optimal levels of an elitist (1+1) EA.
///
/// R is L x L and column-oriented: R(i,j) is the one-step probability of
/// moving from level j+1 to level i+1. r[j] is the probability of jumping
/// from level j+1 straight to the optimum. Each column of the full chain
/// (optimum row plus R) must sum to one.
struct TransitionModel {
    LevelDecomposition levels;
    Matrix R;
    Vec r;

    int dim() const { return levels.L; }
};

/// Probability mass over the non-optimal levels; p[i] belongs to level i+1.
/// The total may be below one (the remainder sits on the optimum).
struct Distribution {
    Vec p;
};

/// Expected fitness gap per generation, e[t] for t = 0..t_max.
struct ErrorTrajectory {
    Vec values;
};

/// Errors of the non-optimal levels as a dense vector (index i -> level i+1).
inline Vec nonoptimal_errors(const TransitionModel& m) {
    return Vec(m.levels.error.begin() + 1, m.levels.error.end());
}

/// Checks every structural invariant and reports violations as strings.
/// An empty result means the model is well formed. Violations are data,
/// not exceptions: callers decide how strict to be.
inline std::vector<std::string> validate_model(const TransitionModel& m) {
    std::vector<std::string> out;
    const int L = m.levels.L;
    if (L < 1) out.push_back("no non-optimal levels (L < 1)");
    if (static_cast<int>(m.levels.fitness.size()) != L + 1)
        out.push_back("fitness vector has wrong length");
    if (static_cast<int>(m.levels.error.size()) != L + 1)
        out.push_back("error vector has wrong length");
    if (static_cast<int>(m.R.rows()) != L || static_cast<int>(m.R.cols()) != L)
        out.push_back("R has wrong shape");
    if (static_cast<int>(m.r.size()) != L)
        out.push_back("r has wrong length");
    if (!out.empty()) return out;  // shape is broken; value checks would lie

    for (int i = 1; i <= L; ++i)
        if (!(m.levels.fitness[0] > m.levels.fitness[i])) {
            out.push_back("fitness[0] is not strictly optimal");
            break;
        }
    for (int i = 1; i < L; ++i)
        if (m.levels.fitness[i] < m.levels.fitness[i + 1]) {
            out.push_back("fitness not sorted best to worst");
            break;
        }
    if (std::abs(m.levels.error[0]) > 0.0) out.push_back("error[0] is not zero");
    for (int i = 0; i <= L; ++i) {
        const double want = std::abs(m.levels.fitness[i] - m.levels.fitness[0]);
        if (std::abs(m.levels.error[i] - want) > 1e-12 * std::max(1.0, std::abs(want))) {
            out.push_back("error vector disagrees with fitness gaps");
            break;
        }
    }
    for (int i = 1; i < L; ++i)
        if (m.levels.error[i] > m.levels.error[i + 1] + 1e-12) {
            out.push_back("errors not monotone");
            break;
        }

    for (int j = 0; j < L; ++j) {
        bool bad_entry = m.r[j] < -kEntryTol || m.r[j] > 1.0 + kEntryTol;
        for (int i = 0; i < L && !bad_entry; ++i)
            bad_entry = m.R(i, j) < -kEntryTol || m.R(i, j) > 1.0 + kEntryTol;
        if (bad_entry)
            out.push_back("column " + std::to_string(j + 1) + " has entries outside [0,1]");
        double s = m.r[j];
        for (int i = 0; i < L; ++i) s += m.R(i, j);
        if (std::abs(s - 1.0) > kStochTol)
            out.push_back("column " + std::to_string(j + 1) + " not stochastic");
    }
    return out;
}

/// One generation of the level chain: p <- R p.
inline Distribution distribution_step(const TransitionModel& m, const Distribution& d) {
    if (d.p.size() != static_cast<std::size_t>(m.dim()))
        throw std::invalid_argument("distribution_step: distribution size mismatch");
    return Distribution{mat_vec(m.R, d.p)};
}

/// Expected fitness gap at generation t for the given start, t = 0..t_max.
/// Computed by iterated stepping (O(L^2) per generation), never by forming
/// a matrix power.
inline ErrorTrajectory exact_trajectory(const TransitionModel& m, const Distribution& p0, int t_max) {
    if (t_max < 0) throw std::invalid_argument("exact_trajectory: negative horizon");
    if (p0.p.size() != static_cast<std::size_t>(m.dim()))
        throw std::invalid_argument("exact_trajectory: distribution size mismatch");
    const Vec e = nonoptimal_errors(m);
    ErrorTrajectory tr;
    tr.values.reserve(t_max + 1);
    Vec p = p0.p;
    tr.values.push_back(dot(e, p));
    for (int t = 1; t <= t_max; ++t) {
        p = mat_vec(m.R, p);
        tr.values.push_back(dot(e, p));
    }
    return tr;
}

/// Expected fitness gap of the start distribution.
inline double initial_error(const TransitionModel& m, const Distribution& p0) {
    return dot(nonoptimal_errors(m), p0.p);
}

// Canonical start distributions.
inline Distribution init_worst(int L) {
    Vec p(L, 0.0);
    p.back() = 1.0;
    return Distribution{p};
}
inline Distribution init_uniform(int L) {
    return Distribution{Vec(L, 1.0 / L)};
}
inline Distribution init_level(int L, int k) {
    if (k < 1 || k > L) throw std::invalid_argument("init_level: level out of range");
    Vec p(L, 0.0);
    p[k - 1] = 1.0;
    return Distribution{p};
}

} // namespace eael
