#pragma once

#include "otfs/linalg.hpp"

namespace otfs {

// Real-valued detection problem. `h` carries the block embedding
// [[Re(Hc), -Im(Hc)], [Im(Hc), Re(Hc)]] of a complex channel, and vectors are
// stacked [Re; Im]. `sigma2` is the noise variance per complex dimension;
// each real dimension carries sigma2/2.
struct RealModel {
    Mat h;          // 2KL x 2KL
    Vec y;          // 2KL
    double sigma2 = 0.0;
    Vec x_true;     // empty when ground truth is unknown

    std::size_t dim() const { return y.size(); }
    double noise_var_real() const { return 0.5 * sigma2; }
};

RealModel to_real_model(const CMat& h, const CVec& y, double sigma2);
RealModel to_real_model(const CMat& h, const CVec& y, double sigma2, const CVec& x_true);

Mat real_embed(const CMat& h);
Vec real_embed(const CVec& v);            // [Re; Im]
CVec complex_from_real(const Vec& v);

// Column-wise vectorization of an L x K matrix and its inverse.
CVec vec_columns(const CMat& x);
CMat unvec_columns(const CVec& v, std::size_t rows, std::size_t cols);

}  // namespace otfs
