#include "otfs/model.hpp"

#include <stdexcept>

namespace otfs {

Mat real_embed(const CMat& h) {
    if (h.rows != h.cols) throw std::invalid_argument("real_embed: matrix not square");
    const std::size_t n = h.rows;
    Mat r(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double re = h(i, j).real();
            const double im = h(i, j).imag();
            r(i, j) = re;
            r(i, j + n) = -im;
            r(i + n, j) = im;
            r(i + n, j + n) = re;
        }
    }
    return r;
}

Vec real_embed(const CVec& v) {
    Vec r(2 * v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        r[i] = v[i].real();
        r[i + v.size()] = v[i].imag();
    }
    return r;
}

CVec complex_from_real(const Vec& v) {
    if (v.size() % 2 != 0) throw std::invalid_argument("complex_from_real: odd length");
    const std::size_t n = v.size() / 2;
    CVec c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = {v[i], v[i + n]};
    return c;
}

RealModel to_real_model(const CMat& h, const CVec& y, double sigma2) {
    if (h.rows != h.cols) throw std::invalid_argument("to_real_model: matrix not square");
    if (y.size() != h.rows) throw std::invalid_argument("to_real_model: vector size mismatch");
    RealModel m;
    m.h = real_embed(h);
    m.y = real_embed(y);
    m.sigma2 = sigma2;
    return m;
}

RealModel to_real_model(const CMat& h, const CVec& y, double sigma2, const CVec& x_true) {
    RealModel m = to_real_model(h, y, sigma2);
    if (x_true.size() != h.cols)
        throw std::invalid_argument("to_real_model: ground truth size mismatch");
    m.x_true = real_embed(x_true);
    return m;
}

CVec vec_columns(const CMat& x) {
    CVec v(x.rows * x.cols);
    std::size_t n = 0;
    for (std::size_t j = 0; j < x.cols; ++j)
        for (std::size_t i = 0; i < x.rows; ++i) v[n++] = x(i, j);
    return v;
}

CMat unvec_columns(const CVec& v, std::size_t rows, std::size_t cols) {
    if (v.size() != rows * cols) throw std::invalid_argument("unvec_columns: size mismatch");
    CMat x(rows, cols);
    std::size_t n = 0;
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t i = 0; i < rows; ++i) x(i, j) = v[n++];
    return x;
}

}  // namespace otfs
