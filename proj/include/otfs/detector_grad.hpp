#pragma once

#include "otfs/detector.hpp"

namespace otfs {

// Squared-error loss of one sample against pm.x_true, evaluated at the output
// of layer `eval_layer` (1-based; <= 0 means the final layer).
double sample_loss(const PreparedModel& pm, const DetectorParams& params, int eval_layer = 0);

// Same loss plus its exact reverse-mode gradient with respect to
// (theta1[0..T), theta2[0..T), theta3[0..T)), accumulated into grad_out
// (size 3T). Components of layers beyond eval_layer are untouched (zero
// contribution): truncating the unfolding cuts the dependency exactly.
double sample_loss_and_grad(const PreparedModel& pm, const DetectorParams& params,
                            Vec& grad_out, int eval_layer = 0);

}  // namespace otfs
