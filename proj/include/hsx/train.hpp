#pragma once

#include <functional>
#include <vector>

#include "hsx/synthgen.hpp"
#include "hsx/unet.hpp"

namespace hsx {

struct TrainConfig {
  double lr = 5e-5;
  int batch = 32;
  double alpha = 0.3;
  double beta = 0.7;
  int64_t max_steps = 40000;
  double delta_min = 0.001;
  int64_t eval_interval = 1000;
  int patience = 5;
  int workers = 2;  // sample-producer threads
};

struct LossRow {
  int64_t step = 0;
  double loss = 0.0;
  double val_dice = 0.0;
  bool has_val = false;
};

struct TrainReport {
  int64_t steps_run = 0;
  double final_loss = 0.0;
  std::vector<LossRow> log;
  bool early_stopped = false;
  double best_val = 0.0;
  int stop_eval_index = -1;  // evaluation index at which training stopped
};

// Validation-metric early stopping: the first observation sets the baseline;
// an observation counts as improvement only when it beats the best by at
// least delta_min (sub-threshold improvements do not move the baseline).
// Stops once `patience` consecutive evaluations fail to improve.
class EarlyStopper {
 public:
  EarlyStopper(double delta_min, int patience)
      : delta_min_(delta_min), patience_(patience) {}

  // Returns true when training should stop at this evaluation.
  bool observe(double metric) {
    ++evals_;
    if (!has_best_) {
      best_ = metric;
      has_best_ = true;
      return false;
    }
    if (metric >= best_ + delta_min_) {
      best_ = metric;
      streak_ = 0;
      return false;
    }
    ++streak_;
    return streak_ >= patience_;
  }

  int evaluations() const { return evals_; }
  double best() const { return best_; }

 private:
  double delta_min_;
  int patience_;
  int evals_ = 0;
  int streak_ = 0;
  double best_ = 0.0;
  bool has_best_ = false;
};

// Deterministic sample stream: the factory must be a pure function of the
// index so producer parallelism cannot change results.
using SampleFactory = std::function<SynthSample(int64_t)>;

struct ValPair {
  MultiChannelVolume input;
  LabelMap target;
};

// Runs exactly tc.max_steps - start optimization steps of the combined
// Dice + distance-regression loss (the model's Adam counter is the start).
TrainReport train_hyp(Model& model, const SampleFactory& samples, const TrainConfig& tc);

// Second stage: the image channel of each input is gated by the frozen
// whole-structure model's hard foreground before entering the subregion
// model; validation mean Dice drives early stopping.
TrainReport train_sub(Model& model_sub, const Model& frozen_hyp,
                      const SampleFactory& samples, const std::vector<ValPair>& validation,
                      const TrainConfig& tc);

// Tensor bridging used by training and inference.
Tensor tensor_from_mcv(const MultiChannelVolume& mc);
Volume volume_from_tensor_channel(const Tensor& t, int n, int c, const Affine& affine);

// Hard foreground of the whole-structure model on a batch: argmax of the two
// segmentation channels, as an (N,1,...) mask tensor.
Tensor hyp_foreground_mask(const Model& hyp, const Tensor& x);

// Image-channel gating: returns x with channel 0 multiplied by the mask;
// coordinate channels pass through.
Tensor mask_image_channel(const Tensor& x, const Tensor& mask);

// Mean per-class hard Dice of the subregion model over validation pairs
// (all 12 structure channels; absent-in-both classes count 1).
double validation_mean_dice(const Model& sub, const Model& hyp,
                            const std::vector<ValPair>& validation);

}  // namespace hsx
