#include "hsx/losses.hpp"

#include <algorithm>
#include <cmath>

namespace hsx {

Tensor softmax_channels(const Tensor& logits) {
  if (logits.c() < 1) throw ShapeError("softmax: need at least one channel");
  Tensor out = Tensor::zeros_like(logits);
  const int C = logits.c();
  const std::size_t sp = logits.spatial();
  for (int n = 0; n < logits.n(); ++n) {
    const double* in = logits.sample_channel(n, 0);
    double* o = out.sample_channel(n, 0);
    for (std::size_t f = 0; f < sp; ++f) {
      double mx = in[f];
      for (int c = 1; c < C; ++c) mx = std::max(mx, in[c * sp + f]);
      double sum = 0.0;
      for (int c = 0; c < C; ++c) {
        const double e = std::exp(in[c * sp + f] - mx);
        o[c * sp + f] = e;
        sum += e;
      }
      const double inv = 1.0 / sum;
      for (int c = 0; c < C; ++c) o[c * sp + f] *= inv;
    }
  }
  return out;
}

namespace {

// Per-foreground-channel overlap sums pooled over batch and voxels.
struct DiceSums {
  std::vector<double> inter;  // sum p*t
  std::vector<double> psum;
  std::vector<double> tsum;
};

DiceSums dice_sums(const Tensor& p, const Tensor& t) {
  if (p.shape != t.shape) throw ShapeError("dice: shape mismatch");
  if (p.c() < 2) throw ShapeError("dice: need a foreground channel");
  const int C = p.c();
  const std::size_t sp = p.spatial();
  DiceSums s;
  s.inter.assign(C, 0.0);
  s.psum.assign(C, 0.0);
  s.tsum.assign(C, 0.0);
  for (int n = 0; n < p.n(); ++n) {
    for (int c = 1; c < C; ++c) {
      const double* pp = p.sample_channel(n, c);
      const double* tt = t.sample_channel(n, c);
      for (std::size_t f = 0; f < sp; ++f) {
        s.inter[c] += pp[f] * tt[f];
        s.psum[c] += pp[f];
        s.tsum[c] += tt[f];
      }
    }
  }
  return s;
}

}  // namespace

double dice_loss(const Tensor& pred_soft, const Tensor& target_onehot) {
  const DiceSums s = dice_sums(pred_soft, target_onehot);
  const int C = pred_soft.c();
  double acc = 0.0;
  for (int c = 1; c < C; ++c) {
    acc += (2.0 * s.inter[c] + kDiceEps) / (s.psum[c] + s.tsum[c] + kDiceEps);
  }
  return 1.0 - acc / static_cast<double>(C - 1);
}

Tensor dice_loss_backward(const Tensor& pred_soft, const Tensor& target_onehot) {
  const DiceSums s = dice_sums(pred_soft, target_onehot);
  const int C = pred_soft.c();
  const std::size_t sp = pred_soft.spatial();
  const double k = 1.0 / static_cast<double>(C - 1);
  Tensor g = Tensor::zeros_like(pred_soft);
  for (int n = 0; n < pred_soft.n(); ++n) {
    for (int c = 1; c < C; ++c) {
      const double A = 2.0 * s.inter[c] + kDiceEps;
      const double B = s.psum[c] + s.tsum[c] + kDiceEps;
      const double* tt = target_onehot.sample_channel(n, c);
      double* gg = g.sample_channel(n, c);
      for (std::size_t f = 0; f < sp; ++f) {
        gg[f] = -k * (2.0 * tt[f] * B - A) / (B * B);
      }
    }
  }
  return g;
}

namespace {

// Chain rule through the per-voxel softmax: gz_i = p_i (gp_i - sum_c gp_c p_c).
Tensor softmax_chain(const Tensor& p, const Tensor& gp) {
  Tensor gz = Tensor::zeros_like(p);
  const int C = p.c();
  const std::size_t sp = p.spatial();
  for (int n = 0; n < p.n(); ++n) {
    const double* pp = p.sample_channel(n, 0);
    const double* gg = gp.sample_channel(n, 0);
    double* oz = gz.sample_channel(n, 0);
    for (std::size_t f = 0; f < sp; ++f) {
      double dotv = 0.0;
      for (int c = 0; c < C; ++c) dotv += gg[c * sp + f] * pp[c * sp + f];
      for (int c = 0; c < C; ++c) {
        oz[c * sp + f] = pp[c * sp + f] * (gg[c * sp + f] - dotv);
      }
    }
  }
  return gz;
}

}  // namespace

HypLossResult loss_hyp(const Tensor& seg_logits, const Tensor& dist_pred,
                       const Tensor& target_onehot, const Tensor& dist_target,
                       double alpha, double beta) {
  if (seg_logits.shape != target_onehot.shape) {
    throw ShapeError("loss_hyp: seg/target shape mismatch");
  }
  if (dist_pred.shape != dist_target.shape) {
    throw ShapeError("loss_hyp: distance shape mismatch");
  }
  HypLossResult res;
  const Tensor p = softmax_channels(seg_logits);
  res.dice_term = dice_loss(p, target_onehot);
  Tensor gp = dice_loss_backward(p, target_onehot);
  for (double& v : gp.data) v *= alpha;
  res.grad_seg_logits = softmax_chain(p, gp);

  const double inv_n = 1.0 / static_cast<double>(dist_pred.numel());
  res.grad_dist_pred = Tensor::zeros_like(dist_pred);
  double mse = 0.0;
  for (std::size_t f = 0; f < dist_pred.numel(); ++f) {
    const double d = dist_pred.data[f] - dist_target.data[f];
    mse += d * d;
    res.grad_dist_pred.data[f] = beta * 2.0 * d * inv_n;
  }
  res.mse_term = mse * inv_n;
  res.total = alpha * res.dice_term + beta * res.mse_term;
  return res;
}

Tensor one_hot_classes(const Tensor& target_classes, int num_classes) {
  if (target_classes.c() != 1) throw ShapeError("one_hot_classes: expect 1 channel");
  Tensor out(target_classes.n(), num_classes, target_classes.d(), target_classes.h(),
             target_classes.w());
  const std::size_t sp = target_classes.spatial();
  for (int n = 0; n < target_classes.n(); ++n) {
    const double* tc = target_classes.sample_channel(n, 0);
    for (std::size_t f = 0; f < sp; ++f) {
      const int cls = static_cast<int>(std::llround(tc[f]));
      if (cls < 0 || cls >= num_classes) {
        throw LabelError("class index out of range: " + std::to_string(cls));
      }
      out.sample_channel(n, cls)[f] = 1.0;
    }
  }
  return out;
}

SubLossResult loss_sub(const Tensor& logits, const Tensor& target_classes, double alpha,
                       double beta) {
  const int C = logits.c();
  const Tensor t_onehot = one_hot_classes(target_classes, C);
  SubLossResult res;
  const Tensor p = softmax_channels(logits);
  res.dice_term = dice_loss(p, t_onehot);
  Tensor gp = dice_loss_backward(p, t_onehot);
  for (double& v : gp.data) v *= alpha;
  Tensor gz = softmax_chain(p, gp);

  // Cross-entropy from the logits directly (log-sum-exp form).
  const std::size_t sp = logits.spatial();
  const double inv_n = 1.0 / (static_cast<double>(logits.n()) * sp);
  double ce = 0.0;
  for (int n = 0; n < logits.n(); ++n) {
    const double* in = logits.sample_channel(n, 0);
    const double* tc = target_classes.sample_channel(n, 0);
    for (std::size_t f = 0; f < sp; ++f) {
      double mx = in[f];
      for (int c = 1; c < C; ++c) mx = std::max(mx, in[c * sp + f]);
      double sum = 0.0;
      for (int c = 0; c < C; ++c) sum += std::exp(in[c * sp + f] - mx);
      const int cls = static_cast<int>(std::llround(tc[f]));
      ce += std::log(sum) + mx - in[cls * sp + f];
    }
  }
  res.ce_term = ce * inv_n;
  // d CE / d logits = (softmax - onehot) / N.
  for (std::size_t f = 0; f < gz.numel(); ++f) {
    gz.data[f] += beta * (p.data[f] - t_onehot.data[f]) * inv_n;
  }
  res.grad_logits = std::move(gz);
  res.total = alpha * res.dice_term + beta * res.ce_term;
  return res;
}

}  // namespace hsx
