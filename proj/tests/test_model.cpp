#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "eael/builders.hpp"
#include "eael/model.hpp"

using namespace eael;
using Catch::Approx;

namespace {

// Reference trajectory computed through explicit matrix powers, a route the
// production code never takes (it iterates the distribution instead).
Vec power_route_trajectory(const TransitionModel& m, const Distribution& p0, int t_max) {
    const Vec e = nonoptimal_errors(m);
    Vec out;
    for (int t = 0; t <= t_max; ++t) {
        const Matrix rt = matrix_power(m.R, t);
        out.push_back(dot(e, mat_vec(rt, p0.p)));
    }
    return out;
}

TransitionModel tiny_valid_model() {
    TransitionModel m;
    m.levels = make_levels(Vec{3.0, 2.0, 1.0});
    m.R = Matrix(2, 2);
    m.R(0, 0) = 0.6;
    m.R(0, 1) = 0.3;
    m.R(1, 1) = 0.7;
    m.r = Vec{0.4, 0.0};
    return m;
}

} // namespace

TEST_CASE("make_levels derives errors from fitness gaps") {
    const LevelDecomposition lv = make_levels(Vec{5.0, 4.0, 1.5, 0.0});
    REQUIRE(lv.L == 3);
    REQUIRE(lv.f_opt() == 5.0);
    REQUIRE(lv.error[0] == 0.0);
    REQUIRE(lv.error[1] == Approx(1.0));
    REQUIRE(lv.error[2] == Approx(3.5));
    REQUIRE(lv.error[3] == Approx(5.0));
}

TEST_CASE("make_levels rejects empty input") {
    REQUIRE_THROWS_AS(make_levels(Vec{}), std::invalid_argument);
}

TEST_CASE("validate_model passes a healthy chain") {
    REQUIRE(validate_model(tiny_valid_model()).empty());
    for (int n : {2, 5, 10}) REQUIRE(validate_model(build_onemax_obse(n)).empty());
}

TEST_CASE("validate_model flags broken columns") {
    auto m = tiny_valid_model();
    m.R(1, 1) = 0.9;  // column 2 now sums to 1.2
    const auto report = validate_model(m);
    REQUIRE_FALSE(report.empty());
    const bool found = std::any_of(report.begin(), report.end(), [](const std::string& s) {
        return s.find("column 2 not stochastic") != std::string::npos;
    });
    REQUIRE(found);
}

TEST_CASE("validate_model flags entries outside [0,1]") {
    auto m = tiny_valid_model();
    m.R(0, 0) = -0.1;
    m.r[0] = 1.1;
    const auto report = validate_model(m);
    const bool found = std::any_of(report.begin(), report.end(), [](const std::string& s) {
        return s.find("entries outside [0,1]") != std::string::npos;
    });
    REQUIRE(found);
}

TEST_CASE("validate_model flags unsorted fitness") {
    auto m = tiny_valid_model();
    m.levels.fitness = Vec{3.0, 1.0, 2.0};
    m.levels.error = Vec{0.0, 2.0, 1.0};
    const auto report = validate_model(m);
    const bool sorted_flag = std::any_of(report.begin(), report.end(), [](const std::string& s) {
        return s.find("fitness not sorted") != std::string::npos;
    });
    const bool monotone_flag = std::any_of(report.begin(), report.end(), [](const std::string& s) {
        return s.find("errors not monotone") != std::string::npos;
    });
    REQUIRE(sorted_flag);
    REQUIRE(monotone_flag);
}

TEST_CASE("distribution_step applies the sub-matrix once") {
    const auto m = tiny_valid_model();
    const Distribution p0 = init_worst(m.dim());
    const Distribution p1 = distribution_step(m, p0);
    REQUIRE(p1.p[0] == Approx(0.3));
    REQUIRE(p1.p[1] == Approx(0.7));
}

TEST_CASE("exact_trajectory equals the explicit matrix-power route") {
    for (int n : {2, 4, 7}) {
        const TransitionModel m = build_onemax_obse(n);
        for (const Distribution& p0 :
             {init_worst(n), init_uniform(n), init_level(n, std::max(1, n / 2))}) {
            const ErrorTrajectory tr = exact_trajectory(m, p0, 40);
            const Vec ref = power_route_trajectory(m, p0, 40);
            REQUIRE(tr.values.size() == 41);
            for (int t = 0; t <= 40; ++t)
                REQUIRE(tr.values[t] == Approx(ref[t]).margin(1e-12));
        }
    }
}

TEST_CASE("probability mass never increases under stepping") {
    const TransitionModel m = build_onemax_bwse(6);
    Distribution p = init_uniform(m.dim());
    double mass = 1.0;
    for (int t = 0; t < 60; ++t) {
        p = distribution_step(m, p);
        double s = 0.0;
        for (double v : p.p) {
            REQUIRE(v >= -1e-15);
            s += v;
        }
        REQUIRE(s <= mass + 1e-12);
        mass = s;
    }
}

TEST_CASE("error trajectories of elitist chains never increase") {
    std::vector<TransitionModel> models;
    models.push_back(build_onemax_obse(8));
    models.push_back(build_onemax_bwse(8));
    models.push_back(build_needle_bwse(8));
    models.push_back(build_needle_bwne(5));
    models.push_back(build_mono_obse(6, mono_square));
    for (const auto& m : models) {
        const ErrorTrajectory tr = exact_trajectory(m, init_uniform(m.dim()), 80);
        for (std::size_t t = 1; t < tr.values.size(); ++t)
            REQUIRE(tr.values[t] <= tr.values[t - 1] + 1e-12);
        REQUIRE(tr.values.back() >= 0.0);
    }
}

TEST_CASE("initial distributions") {
    const Distribution w = init_worst(4);
    REQUIRE(w.p == Vec{0.0, 0.0, 0.0, 1.0});
    const Distribution u = init_uniform(4);
    for (double v : u.p) REQUIRE(v == Approx(0.25));
    const Distribution l2 = init_level(4, 2);
    REQUIRE(l2.p == Vec{0.0, 1.0, 0.0, 0.0});
    REQUIRE_THROWS_AS(init_level(4, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(init_level(4, 5), std::invalid_argument);
}

TEST_CASE("initial_error weights level errors by the start distribution") {
    const TransitionModel m = build_onemax_obse(4);
    REQUIRE(initial_error(m, init_worst(4)) == Approx(4.0));
    REQUIRE(initial_error(m, init_uniform(4)) == Approx((1 + 2 + 3 + 4) / 4.0));
    REQUIRE(initial_error(m, init_level(4, 2)) == Approx(2.0));
}
