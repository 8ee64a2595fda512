#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>

#include "eael/builders.hpp"
#include "eael/simulate.hpp"

using namespace eael;
using Catch::Approx;

namespace {

SimConfig base_config(Problem p, Algo a, int n) {
    SimConfig cfg;
    cfg.spec = ProblemSpec{p, a, n, mono_identity};
    cfg.runs = 20000;
    cfg.t_max = 20;
    cfg.seed = 99;
    cfg.init = SimInit::AllZeros;
    return cfg;
}

void require_within_sigmas(const Vec& reference, const EmpiricalTrajectory& emp,
                           std::initializer_list<int> ts, double sigmas) {
    for (int t : ts) {
        const double se = emp.std_error[t];
        INFO("t=" << t << " ref=" << reference[t] << " mc=" << emp.mean_error[t]
                  << " se=" << se);
        if (se == 0.0) REQUIRE(emp.mean_error[t] == Approx(reference[t]).margin(1e-12));
        else REQUIRE(std::abs(emp.mean_error[t] - reference[t]) <= sigmas * se);
    }
}

} // namespace

TEST_CASE("same seed gives identical trajectories") {
    const SimConfig cfg = base_config(Problem::OneMax, Algo::BWSE, 8);
    const EmpiricalTrajectory a = simulate(cfg);
    const EmpiricalTrajectory b = simulate(cfg);
    REQUIRE(a.mean_error == b.mean_error);
    REQUIRE(a.std_error == b.std_error);

    SimConfig other = cfg;
    other.seed = 100;
    const EmpiricalTrajectory c = simulate(other);
    REQUIRE(a.mean_error != c.mean_error);
}

TEST_CASE("results do not depend on the worker count") {
    SimConfig cfg = base_config(Problem::OneMax, Algo::BWSE, 6);
    cfg.runs = 5000;  // spans several run chunks

    setenv("EA_ERROR_LAB_THREADS", "1", 1);
    const EmpiricalTrajectory serial = simulate(cfg);
    setenv("EA_ERROR_LAB_THREADS", "4", 1);
    const EmpiricalTrajectory parallel = simulate(cfg);
    unsetenv("EA_ERROR_LAB_THREADS");

    REQUIRE(serial.mean_error == parallel.mean_error);
    REQUIRE(serial.std_error == parallel.std_error);
}

TEST_CASE("degenerate generations have zero spread") {
    // From the all-zeros string, the one-bit flipper always repairs exactly
    // one bit in the first generation.
    SimConfig cfg = base_config(Problem::OneMax, Algo::OBSE, 4);
    cfg.t_max = 2;
    const EmpiricalTrajectory emp = simulate(cfg);
    REQUIRE(emp.mean_error[0] == 4.0);
    REQUIRE(emp.std_error[0] == 0.0);
    REQUIRE(emp.mean_error[1] == 3.0);
    REQUIRE(emp.std_error[1] == 0.0);
    REQUIRE(emp.std_error[2] > 0.0);
}

TEST_CASE("empirical mean tracks the exact one-bit chain") {
    const int n = 4;
    SimConfig cfg = base_config(Problem::OneMax, Algo::OBSE, n);
    cfg.runs = 40000;
    const EmpiricalTrajectory emp = simulate(cfg);
    const ErrorTrajectory tr = exact_trajectory(build_onemax_obse(n), init_worst(n), cfg.t_max);
    require_within_sigmas(tr.values, emp, {2, 5, 10, 20}, 4.0);
}

TEST_CASE("empirical mean tracks the exact bitwise chain") {
    const int n = 6;
    SimConfig cfg = base_config(Problem::OneMax, Algo::BWSE, n);
    cfg.runs = 40000;
    const EmpiricalTrajectory emp = simulate(cfg);
    const ErrorTrajectory tr = exact_trajectory(build_onemax_bwse(n), init_worst(n), cfg.t_max);
    require_within_sigmas(tr.values, emp, {1, 3, 7, 15}, 4.0);
}

TEST_CASE("uniform starts follow the binomial mixture of the plateau chain") {
    const int n = 5;
    SimConfig cfg = base_config(Problem::Needle, Algo::BWSE, n);
    cfg.runs = 60000;
    cfg.init = SimInit::UniformRandom;
    const EmpiricalTrajectory emp = simulate(cfg);

    Distribution p0;
    p0.p.assign(n, 0.0);
    for (int i = 1; i <= n; ++i)
        p0.p[i - 1] = detail::binom_exact(n, i) / std::pow(2.0, n);
    const ErrorTrajectory tr = exact_trajectory(build_needle_bwse(n), p0, cfg.t_max);
    require_within_sigmas(tr.values, emp, {0, 1, 2, 5, 10, 20}, 4.0);
}

TEST_CASE("monotone transforms change the tracked error, not the dynamics") {
    const int n = 4;
    SimConfig cfg = base_config(Problem::Mono, Algo::OBSE, n);
    cfg.spec.mono_f = mono_square;
    cfg.runs = 40000;
    const EmpiricalTrajectory emp = simulate(cfg);
    const ErrorTrajectory tr =
        exact_trajectory(build_mono_obse(n, mono_square), init_worst(n), cfg.t_max);
    REQUIRE(emp.mean_error[0] == 16.0);
    require_within_sigmas(tr.values, emp, {1, 4, 9, 18}, 4.0);
}

TEST_CASE("prefix-counting fitness has the expected first step") {
    const int n = 4;
    SimConfig cfg = base_config(Problem::LeadingOnes, Algo::OBSE, n);
    cfg.runs = 40000;
    cfg.t_max = 1;
    const EmpiricalTrajectory emp = simulate(cfg);
    REQUIRE(emp.mean_error[0] == 4.0);
    // One flip in four repairs the first bit (error 3), otherwise rejected.
    const double expect = 0.25 * 3.0 + 0.75 * 4.0;
    REQUIRE(std::abs(emp.mean_error[1] - expect) <= 4.0 * emp.std_error[1]);
}

TEST_CASE("fixed bitstring starts are honored") {
    SimConfig cfg = base_config(Problem::OneMax, Algo::OBSE, 4);
    cfg.init = SimInit::FixedBitstring;
    cfg.fixed_bits = 0b0101;  // two ones
    cfg.t_max = 0;
    cfg.runs = 500;
    const EmpiricalTrajectory emp = simulate(cfg);
    REQUIRE(emp.mean_error[0] == 2.0);
    REQUIRE(emp.std_error[0] == 0.0);
}

TEST_CASE("starting on the plateau needle stays converged") {
    SimConfig cfg = base_config(Problem::Needle, Algo::BWSE, 3);
    cfg.init = SimInit::FixedBitstring;
    cfg.fixed_bits = 0;  // the needle itself
    cfg.runs = 200;
    cfg.t_max = 5;
    const EmpiricalTrajectory emp = simulate(cfg);
    for (int t = 0; t <= 5; ++t) {
        REQUIRE(emp.mean_error[t] == 0.0);
        REQUIRE(emp.std_error[t] == 0.0);
    }
}

TEST_CASE("instance construction guards") {
    REQUIRE_THROWS_AS(detail::make_instance(ProblemSpec{Problem::OneMax, Algo::OBSE, 0, mono_identity}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(detail::make_instance(ProblemSpec{Problem::OneMax, Algo::OBSE, 65, mono_identity}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(
        detail::make_instance(ProblemSpec{Problem::Mono, Algo::OBSE, 4, [](int) { return 0.0; }}),
        std::invalid_argument);
}

TEST_CASE("per-run streams decorrelate runs under one seed") {
    detail::SplitMix64 s0 = detail::run_stream(42, 0);
    detail::SplitMix64 s1 = detail::run_stream(42, 1);
    REQUIRE(s0.next() != s1.next());
}

TEST_CASE("accumulator matches direct formulas and merging") {
    detail::Accumulator one;
    for (double x : {1.0, 2.0, 3.0, 4.0, 5.0}) one.push(x);
    REQUIRE(one.count == 5);
    REQUIRE(one.mean == Approx(3.0));
    REQUIRE(one.std_error() == Approx(std::sqrt(2.5 / 5.0)));

    detail::Accumulator left, right;
    for (double x : {1.0, 2.0}) left.push(x);
    for (double x : {3.0, 4.0, 5.0}) right.push(x);
    left.merge(right);
    REQUIRE(left.count == 5);
    REQUIRE(left.mean == Approx(3.0).margin(1e-14));
    REQUIRE(left.m2 == Approx(one.m2).margin(1e-12));

    detail::Accumulator tiny;
    tiny.push(7.0);
    REQUIRE(tiny.std_error() == 0.0);
}

TEST_CASE("comparison flags four-sigma excursions in exact mode") {
    EmpiricalTrajectory emp;
    emp.mean_error = {1.0, 0.51};
    emp.std_error = {0.001, 0.001};
    emp.runs = 1000;
    const Vec reference{1.0, 0.5};
    const ComparisonReport rep =
        compare_trajectories(reference, emp, {0, 1}, CompareMode::Exact);
    REQUIRE(rep.entries.size() == 2);
    REQUIRE_FALSE(rep.entries[0].flagged);
    REQUIRE(rep.entries[1].flagged);
    REQUIRE(rep.entries[1].z == Approx(10.0));
    REQUIRE(rep.any_flag);
    REQUIRE(rep.max_abs_z == Approx(10.0));
}

TEST_CASE("bound mode only flags means above the bound") {
    EmpiricalTrajectory emp;
    emp.mean_error = {0.4, 0.6};
    emp.std_error = {0.001, 0.001};
    emp.runs = 1000;
    const Vec bound{0.5, 0.5};
    const ComparisonReport rep = compare_trajectories(bound, emp, {0, 1}, CompareMode::Bound);
    REQUIRE_FALSE(rep.entries[0].flagged);  // far below the bound is fine
    REQUIRE(rep.entries[1].flagged);
}

TEST_CASE("exact disagreement with zero spread is flagged as infinite") {
    EmpiricalTrajectory emp;
    emp.mean_error = {2.0};
    emp.std_error = {0.0};
    emp.runs = 10;
    const ComparisonReport rep =
        compare_trajectories(Vec{1.0}, emp, {0}, CompareMode::Exact);
    REQUIRE(rep.entries[0].flagged);
    REQUIRE(std::isinf(rep.entries[0].z));
}
