#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace otfs {

using cplx = std::complex<double>;
using Vec = std::vector<double>;
using CVec = std::vector<cplx>;

// Dense row-major real matrix.
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

// Dense row-major complex matrix.
struct CMat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    CVec a;

    CMat() = default;
    CMat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, cplx(0.0, 0.0)) {}

    cplx& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    cplx operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    static CMat identity(std::size_t n) {
        CMat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = cplx(1.0, 0.0);
        return m;
    }
};

namespace linalg {

// Default entry points run the OpenMP kernels (serial when built without OpenMP).
// linalg::serial holds the plain reference implementations kept for testing;
// for identical inputs both variants produce bitwise-identical results because
// every output element is accumulated in the same index order.

Mat gram(const Mat& h);                       // G = HᵀH
void matvec(const Mat& a, const Vec& x, Vec& y);
Vec matvec(const Mat& a, const Vec& x);
CMat cmat_mul(const CMat& a, const CMat& b);
Mat cholesky_factor(const Mat& a);            // lower L with A = LLᵀ; throws on non-SPD
Vec cholesky_solve(const Mat& chol_lower, const Vec& rhs);

namespace serial {
Mat gram(const Mat& h);
void matvec(const Mat& a, const Vec& x, Vec& y);
CMat cmat_mul(const CMat& a, const CMat& b);
Mat cholesky_factor(const Mat& a);
Vec cholesky_solve(const Mat& chol_lower, const Vec& rhs);
}  // namespace serial

double frob_norm(const CMat& m);
double frob_norm(const Mat& m);
double norm2(const Vec& v);

}  // namespace linalg
}  // namespace otfs
