#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace eael {

using Vec = std::vector<double>;

// Small dense row-major matrix. Sized for chains with at most a few
// thousand states; no attempt at BLAS-grade performance.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), d_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return d_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return d_[i * cols_ + j]; }

    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    Vec d_;
};

inline Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("multiply: shape mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline Vec mat_vec(const Matrix& a, const Vec& x) {
    if (a.cols() != x.size()) throw std::invalid_argument("mat_vec: shape mismatch");
    Vec y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

// Explicit t-th power by repeated multiplication; used as an independent
// reference path in tests, deliberately separate from iterated stepping.
inline Matrix matrix_power(const Matrix& a, int t) {
    if (a.rows() != a.cols()) throw std::invalid_argument("matrix_power: not square");
    if (t < 0) throw std::invalid_argument("matrix_power: negative exponent");
    Matrix p = Matrix::identity(a.rows());
    for (int k = 0; k < t; ++k) p = multiply(p, a);
    return p;
}

inline Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

inline double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

inline bool is_upper_triangular(const Matrix& a, double tol = 1e-14) {
    if (a.rows() != a.cols()) return false;
    for (std::size_t i = 1; i < a.rows(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(a(i, j)) > tol) return false;
    return true;
}

inline bool is_diagonal(const Matrix& a, double tol = 1e-14) {
    if (a.rows() != a.cols()) return false;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j && std::abs(a(i, j)) > tol) return false;
    return true;
}

inline bool is_symmetric(const Matrix& a, double tol = 1e-12) {
    if (a.rows() != a.cols()) return false;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            if (std::abs(a(i, j) - a(j, i)) > tol) return false;
    return true;
}

// Solves U x = b for upper-triangular U with nonzero diagonal.
inline Vec solve_upper_triangular(const Matrix& u, const Vec& b) {
    const std::size_t n = u.rows();
    if (u.cols() != n || b.size() != n) throw std::invalid_argument("solve_upper_triangular: shape mismatch");
    Vec x(n, 0.0);
    for (std::size_t ip = n; ip-- > 0;) {
        double s = b[ip];
        for (std::size_t j = ip + 1; j < n; ++j) s -= u(ip, j) * x[j];
        if (u(ip, ip) == 0.0) throw std::invalid_argument("solve_upper_triangular: zero pivot");
        x[ip] = s / u(ip, ip);
    }
    return x;
}

// Gauss-Jordan inverse with partial pivoting; fine for the small dense
// matrices handled here.
inline Matrix inverse(const Matrix& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("inverse: not square");
    Matrix w = a;
    Matrix inv = Matrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t i = col + 1; i < n; ++i)
            if (std::abs(w(i, col)) > std::abs(w(piv, col))) piv = i;
        if (w(piv, col) == 0.0) throw std::invalid_argument("inverse: singular matrix");
        if (piv != col)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(w(piv, j), w(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        const double d = w(col, col);
        for (std::size_t j = 0; j < n; ++j) { w(col, j) /= d; inv(col, j) /= d; }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col) continue;
            const double f = w(i, col);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) { w(i, j) -= f * w(col, j); inv(i, j) -= f * inv(col, j); }
        }
    }
    return inv;
}

} // namespace eael
