#pragma once

#include <vector>

#include "otfs/constellation.hpp"
#include "otfs/linalg.hpp"
#include "otfs/model.hpp"

namespace otfs {

// Trainable per-layer scalars of the unfolded detector. theta2/theta3 scale
// variances and squared errors and must stay positive; all-ones parameters
// reduce the detector to classical BPIC.
struct DetectorParams {
    std::vector<double> theta1;
    std::vector<double> theta2;
    std::vector<double> theta3;

    int layers() const { return static_cast<int>(theta1.size()); }
    static DetectorParams ones(int layers);
    void validate() const;  // throws std::invalid_argument
};

// Per-layer quantities kept for diagnostics and the layers sweep.
struct LayerState {
    Vec x_hat;   // combined symbol estimates
    Vec v;       // combined estimate variances
    Vec mu;      // BSO means
    Vec sigma;   // BSO variances
    Vec e;       // weighted squared residual errors
    Vec rho;     // DSC combining weights
};

// Everything the layer recursion needs, computed once per model: the Gram
// matrix G = HᵀH, its elementwise square, the matched filter b = Hᵀy, column
// energies, the MMSE initial estimate and its residual error.
struct PreparedModel {
    std::size_t dim = 0;
    Mat gram;
    Mat gram_sq;
    Vec matched;
    Vec col_energy;
    Vec mmse;
    Vec init_error;
    double sigma2 = 0.0;
    double noise_var_real = 0.0;
    Vec x_true;                     // carried through when the model has ground truth
    std::vector<double> alphabet;   // real levels used by the BSE
};

PreparedModel prepare_model(const RealModel& m, const Constellation& c);

// Regularized LS estimate solving (HᵀH + sigma2 I) x = Hᵀy via Cholesky.
Vec mmse_init(const RealModel& m);

LayerState initial_state(const PreparedModel& pm);

// Matched-filter PIC observation: means from the theta1-weighted residual
// step, variances from interference (j != q) plus the per-real-dimension
// noise term, scaled by theta2.
void bso(const PreparedModel& pm, const LayerState& prev, double theta1, double theta2,
         Vec& mu, Vec& sigma);

// Posterior mean/variance over the discrete alphabet for each element;
// exponents are max-subtracted and variances clamped below at 1e-13.
void bse(const Vec& mu, const Vec& sigma, const std::vector<double>& alphabet,
         Vec& x_hat, Vec& v);

// Blends previous and current estimates with weights from consecutive
// residual errors; `curr` carries the BSE outputs in x_hat/v.
LayerState dsc(const PreparedModel& pm, const LayerState& prev, const LayerState& curr,
               double theta3);

struct DetectResult {
    Vec x_hat;
    std::vector<LayerState> trace;
};

DetectResult detect(const PreparedModel& pm, const DetectorParams& params,
                    bool want_trace = true);
DetectResult detect(const RealModel& m, const DetectorParams& params, const Constellation& c);

// Exhaustive minimum-distance search over all M^KL candidate vectors.
// Guarded: KL <= 8 and M^KL <= 1e6, otherwise throws.
CVec ml_oracle(const RealModel& m, const Constellation& c);

// Pairs real dimensions back into complex symbols and quantizes to the
// nearest constellation point (ties toward the smaller point index).
CVec hard_decision(const Vec& x_hat, const Constellation& c);
std::vector<int> hard_decision_labels(const Vec& x_hat, const Constellation& c);

}  // namespace otfs
