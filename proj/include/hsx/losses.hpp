#pragma once

#include "hsx/tensor.hpp"

namespace hsx {

// Per-voxel channel softmax, numerically stabilized; sums to 1 within 1e-12.
Tensor softmax_channels(const Tensor& logits);

// Soft Dice loss over foreground channels (1..C-1), pooled over batch and
// voxels per channel: 1 - mean_c (2*sum(p*t) + eps) / (sum p + sum t + eps).
double dice_loss(const Tensor& pred_soft, const Tensor& target_onehot);
Tensor dice_loss_backward(const Tensor& pred_soft, const Tensor& target_onehot);

constexpr double kDiceEps = 1e-6;

// Whole-structure loss: alpha * DiceLoss(softmax(seg_logits), target) +
// beta * MSE(dist_pred, dist_target).
struct HypLossResult {
  double total = 0.0;
  double dice_term = 0.0;
  double mse_term = 0.0;
  Tensor grad_seg_logits;
  Tensor grad_dist_pred;
};
HypLossResult loss_hyp(const Tensor& seg_logits, const Tensor& dist_pred,
                       const Tensor& target_onehot, const Tensor& dist_target,
                       double alpha = 0.3, double beta = 0.7);

// Subregion loss: alpha * DiceLoss + beta * mean cross-entropy against the
// per-voxel class index. target_classes is (N,1,D,H,W) holding indices in
// [0, C).
struct SubLossResult {
  double total = 0.0;
  double dice_term = 0.0;
  double ce_term = 0.0;
  Tensor grad_logits;
};
SubLossResult loss_sub(const Tensor& logits, const Tensor& target_classes,
                       double alpha = 0.3, double beta = 0.7);

// One-hot along channels from per-voxel class indices.
Tensor one_hot_classes(const Tensor& target_classes, int num_classes);

}  // namespace hsx
