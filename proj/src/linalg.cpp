#include "otfs/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace otfs::linalg {

namespace serial {

Mat gram(const Mat& h) {
    const std::size_t m = h.rows, n = h.cols;
    Mat g(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < m; ++k) acc += h(k, i) * h(k, j);
            g(i, j) = acc;
            g(j, i) = acc;
        }
    }
    return g;
}

void matvec(const Mat& a, const Vec& x, Vec& y) {
    if (x.size() != a.cols) throw std::invalid_argument("matvec: size mismatch");
    y.resize(a.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        double acc = 0.0;
        const double* row = &a.a[i * a.cols];
        for (std::size_t j = 0; j < a.cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

CMat cmat_mul(const CMat& a, const CMat& b) {
    if (a.cols != b.rows) throw std::invalid_argument("cmat_mul: size mismatch");
    CMat c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < b.cols; ++j) {
            cplx acc(0.0, 0.0);
            for (std::size_t k = 0; k < a.cols; ++k) acc += a(i, k) * b(k, j);
            c(i, j) = acc;
        }
    }
    return c;
}

// Pivots at or below n*eps times the largest diagonal entry are treated as a
// numerically singular input.
double pivot_floor(const Mat& a) {
    double amax = 0.0;
    for (std::size_t j = 0; j < a.rows; ++j) amax = std::max(amax, a(j, j));
    return static_cast<double>(a.rows) * 2.23e-16 * amax;
}

Mat cholesky_factor(const Mat& a) {
    if (a.rows != a.cols) throw std::invalid_argument("cholesky: matrix not square");
    const std::size_t n = a.rows;
    const double floor = pivot_floor(a);
    Mat l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (!(diag > floor)) throw std::runtime_error("cholesky: matrix not positive definite");
        const double ljj = std::sqrt(diag);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double acc = a(i, j);
            for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * l(j, k);
            l(i, j) = acc / ljj;
        }
    }
    return l;
}

Vec cholesky_solve(const Mat& l, const Vec& rhs) {
    const std::size_t n = l.rows;
    if (rhs.size() != n) throw std::invalid_argument("cholesky_solve: size mismatch");
    Vec z(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = rhs[i];
        for (std::size_t k = 0; k < i; ++k) acc -= l(i, k) * z[k];
        z[i] = acc / l(i, i);
    }
    Vec x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double acc = z[ii];
        for (std::size_t k = ii + 1; k < n; ++k) acc -= l(k, ii) * x[k];
        x[ii] = acc / l(ii, ii);
    }
    return x;
}

}  // namespace serial

Mat gram(const Mat& h) {
    const std::size_t m = h.rows, n = h.cols;
    Mat g(n, n);
#pragma omp parallel for schedule(dynamic, 8)
    for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t j = i; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < m; ++k) acc += h(k, i) * h(k, j);
            g(i, j) = acc;
            g(j, i) = acc;
        }
    }
    return g;
}

void matvec(const Mat& a, const Vec& x, Vec& y) { serial::matvec(a, x, y); }

Vec matvec(const Mat& a, const Vec& x) {
    Vec y;
    serial::matvec(a, x, y);
    return y;
}

CMat cmat_mul(const CMat& a, const CMat& b) {
    if (a.cols != b.rows) throw std::invalid_argument("cmat_mul: size mismatch");
    CMat c(a.rows, b.cols);
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(a.rows); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t j = 0; j < b.cols; ++j) {
            cplx acc(0.0, 0.0);
            for (std::size_t k = 0; k < a.cols; ++k) acc += a(i, k) * b(k, j);
            c(i, j) = acc;
        }
    }
    return c;
}

Mat cholesky_factor(const Mat& a) {
    if (a.rows != a.cols) throw std::invalid_argument("cholesky: matrix not square");
    const std::size_t n = a.rows;
    const double floor = serial::pivot_floor(a);
    Mat l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (!(diag > floor)) throw std::runtime_error("cholesky: matrix not positive definite");
        const double ljj = std::sqrt(diag);
        l(j, j) = ljj;
#pragma omp parallel for schedule(static) if (n - j > 64)
        for (long long ii = static_cast<long long>(j) + 1; ii < static_cast<long long>(n); ++ii) {
            const auto i = static_cast<std::size_t>(ii);
            double acc = a(i, j);
            for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * l(j, k);
            l(i, j) = acc / ljj;
        }
    }
    return l;
}

Vec cholesky_solve(const Mat& l, const Vec& rhs) { return serial::cholesky_solve(l, rhs); }

double frob_norm(const CMat& m) {
    double acc = 0.0;
    for (const cplx& v : m.a) acc += std::norm(v);
    return std::sqrt(acc);
}

double frob_norm(const Mat& m) {
    double acc = 0.0;
    for (double v : m.a) acc += v * v;
    return std::sqrt(acc);
}

double norm2(const Vec& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

}  // namespace otfs::linalg
