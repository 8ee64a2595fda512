#include <catch2/catch_amalgamated.hpp>

#include "eael/matrix.hpp"

using namespace eael;
using Catch::Approx;

namespace {

Matrix make(std::size_t n, std::initializer_list<double> vals) {
    Matrix m(n, n);
    auto it = vals.begin();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = *it++;
    return m;
}

} // namespace

TEST_CASE("multiply matches hand computation and identity is neutral") {
    const Matrix a = make(2, {1.0, 2.0, 3.0, 4.0});
    const Matrix b = make(2, {5.0, 6.0, 7.0, 8.0});
    const Matrix ab = multiply(a, b);
    REQUIRE(ab(0, 0) == Approx(19.0));
    REQUIRE(ab(0, 1) == Approx(22.0));
    REQUIRE(ab(1, 0) == Approx(43.0));
    REQUIRE(ab(1, 1) == Approx(50.0));
    REQUIRE(max_abs_diff(multiply(a, Matrix::identity(2)), a) == 0.0);
    REQUIRE(max_abs_diff(multiply(Matrix::identity(2), a), a) == 0.0);
}

TEST_CASE("matrix_power agrees with repeated multiplication") {
    const Matrix a = make(3, {0.5, 0.2, 0.0, 0.0, 0.4, 0.3, 0.1, 0.0, 0.6});
    Matrix acc = Matrix::identity(3);
    for (int t = 0; t <= 6; ++t) {
        REQUIRE(max_abs_diff(matrix_power(a, t), acc) < 1e-14);
        acc = multiply(acc, a);
    }
}

TEST_CASE("mat_vec and dot") {
    const Matrix a = make(2, {1.0, 2.0, 3.0, 4.0});
    const Vec x{5.0, 6.0};
    const Vec y = mat_vec(a, x);
    REQUIRE(y[0] == Approx(17.0));
    REQUIRE(y[1] == Approx(39.0));
    REQUIRE(dot(x, y) == Approx(5 * 17 + 6 * 39));
}

TEST_CASE("shape predicates") {
    const Matrix tri = make(3, {1, 2, 3, 0, 4, 5, 0, 0, 6});
    const Matrix dia = make(3, {1, 0, 0, 0, 4, 0, 0, 0, 6});
    const Matrix sym = make(3, {1, 2, 3, 2, 4, 5, 3, 5, 6});
    REQUIRE(is_upper_triangular(tri));
    REQUIRE_FALSE(is_diagonal(tri));
    REQUIRE(is_diagonal(dia));
    REQUIRE(is_upper_triangular(dia));
    REQUIRE(is_symmetric(sym));
    REQUIRE_FALSE(is_symmetric(tri));
    REQUIRE_FALSE(is_upper_triangular(transpose(tri)));
}

TEST_CASE("transpose is an involution") {
    const Matrix a = make(2, {1, 2, 3, 4});
    REQUIRE(max_abs_diff(transpose(transpose(a)), a) == 0.0);
    REQUIRE(transpose(a)(0, 1) == 3.0);
}

TEST_CASE("solve_upper_triangular inverts a known system") {
    const Matrix u = make(3, {2, 1, 0, 0, 4, 3, 0, 0, 5});
    const Vec x_true{1.0, -2.0, 3.0};
    const Vec b = mat_vec(u, x_true);
    const Vec x = solve_upper_triangular(u, b);
    for (int i = 0; i < 3; ++i) REQUIRE(x[i] == Approx(x_true[i]).margin(1e-13));
}

TEST_CASE("solve_upper_triangular rejects singular diagonals") {
    Matrix u = make(2, {1, 2, 0, 0});
    REQUIRE_THROWS_AS(solve_upper_triangular(u, Vec{1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("inverse round-trips against multiply") {
    const Matrix a = make(3, {4, 7, 2, 0, 3, 1, 2, 0, 5});
    const Matrix ai = inverse(a);
    REQUIRE(max_abs_diff(multiply(a, ai), Matrix::identity(3)) < 1e-12);
    REQUIRE(max_abs_diff(multiply(ai, a), Matrix::identity(3)) < 1e-12);
}

TEST_CASE("inverse rejects singular input") {
    const Matrix a = make(2, {1, 2, 2, 4});
    REQUIRE_THROWS_AS(inverse(a), std::invalid_argument);
}

TEST_CASE("max_abs_diff requires same shape") {
    REQUIRE_THROWS_AS(max_abs_diff(Matrix(2, 2), Matrix(3, 3)), std::invalid_argument);
}
