#include "hsx/train.hpp"

#include <condition_variable>
#include <cstring>
#include <mutex>
#include <thread>

#include "hsx/labels.hpp"
#include "hsx/losses.hpp"
#include "hsx/metrics.hpp"
#include "hsx/optim.hpp"

namespace hsx {

Tensor tensor_from_mcv(const MultiChannelVolume& mc) {
  // Volume axis 0 is fastest in memory, tensor W is fastest: map axes
  // (0,1,2) -> (W,H,D) so the flat layouts coincide and copies are flat.
  Tensor t(1, mc.channels, mc.dims[2], mc.dims[1], mc.dims[0]);
  std::memcpy(t.data.data(), mc.data.data(), sizeof(double) * mc.data.size());
  return t;
}

Volume volume_from_tensor_channel(const Tensor& t, int n, int c, const Affine& affine) {
  Volume v({t.w(), t.h(), t.d()}, affine);
  std::memcpy(v.data.data(), t.sample_channel(n, c), sizeof(double) * v.size());
  return v;
}

namespace {

// Bounded queue delivering samples strictly in index order, so results do
// not depend on the number of producer threads.
class SampleQueue {
 public:
  SampleQueue(SampleFactory factory, int64_t start, int64_t end, int workers,
              int capacity)
      : factory_(std::move(factory)),
        start_(start),
        end_(end),
        capacity_(capacity),
        slots_(capacity),
        ready_(capacity, false),
        claim_(start),
        consumed_(start) {
    const int n = std::max(1, workers);
    for (int w = 0; w < n; ++w) {
      threads_.emplace_back([this] { work(); });
    }
  }

  ~SampleQueue() {
    {
      std::unique_lock<std::mutex> lock(mu_);
      shutdown_ = true;
    }
    cv_producer_.notify_all();
    cv_consumer_.notify_all();
    for (auto& t : threads_) t.join();
  }

  SynthSample next() {
    std::unique_lock<std::mutex> lock(mu_);
    const int64_t idx = consumed_;
    cv_consumer_.wait(lock, [&] { return ready_[slot(idx)] || shutdown_; });
    if (!ready_[slot(idx)]) throw StateError("sample queue shut down");
    SynthSample s = std::move(slots_[slot(idx)]);
    ready_[slot(idx)] = false;
    ++consumed_;
    cv_producer_.notify_all();
    return s;
  }

 private:
  std::size_t slot(int64_t idx) const {
    return static_cast<std::size_t>((idx - start_) % capacity_);
  }

  void work() {
    while (true) {
      int64_t idx;
      {
        std::unique_lock<std::mutex> lock(mu_);
        if (shutdown_ || claim_ >= end_) return;
        idx = claim_++;
        // Wait until the slot for this index is free.
        cv_producer_.wait(lock, [&] {
          return shutdown_ || (idx - consumed_) < capacity_;
        });
        if (shutdown_) return;
      }
      SynthSample s = factory_(idx);
      {
        std::unique_lock<std::mutex> lock(mu_);
        slots_[slot(idx)] = std::move(s);
        ready_[slot(idx)] = true;
      }
      cv_consumer_.notify_all();
    }
  }

  SampleFactory factory_;
  const int64_t start_;
  const int64_t end_;
  const int capacity_;
  std::vector<SynthSample> slots_;
  std::vector<bool> ready_;
  int64_t claim_;
  int64_t consumed_;
  bool shutdown_ = false;
  std::mutex mu_;
  std::condition_variable cv_producer_;
  std::condition_variable cv_consumer_;
  std::vector<std::thread> threads_;
};

struct HypBatch {
  Tensor x;
  Tensor target_onehot;  // (N,2,...)
  Tensor dist;           // (N,1,...)
};

HypBatch assemble_hyp_batch(const std::vector<SynthSample>& samples) {
  const auto& first = samples.front().input;
  const int B = static_cast<int>(samples.size());
  HypBatch batch;
  batch.x = Tensor(B, first.channels, first.dims[2], first.dims[1], first.dims[0]);
  batch.target_onehot = Tensor(B, 2, first.dims[2], first.dims[1], first.dims[0]);
  batch.dist = Tensor(B, 1, first.dims[2], first.dims[1], first.dims[0]);
  const std::size_t sp = batch.x.spatial();
  for (int b = 0; b < B; ++b) {
    const SynthSample& s = samples[b];
    std::memcpy(batch.x.sample_channel(b, 0), s.input.data.data(),
                sizeof(double) * s.input.data.size());
    double* bg = batch.target_onehot.sample_channel(b, 0);
    double* fg = batch.target_onehot.sample_channel(b, 1);
    for (std::size_t f = 0; f < sp; ++f) {
      const int id = s.target.id_at(f);
      const bool is_fg = label_ids::is_subregion(id);
      fg[f] = is_fg ? 1.0 : 0.0;
      bg[f] = is_fg ? 0.0 : 1.0;
    }
    std::memcpy(batch.dist.sample_channel(b, 0), s.distmap.data.data(),
                sizeof(double) * sp);
  }
  return batch;
}

Tensor assemble_sub_classes(const std::vector<SynthSample>& samples) {
  const auto& first = samples.front().input;
  const int B = static_cast<int>(samples.size());
  Tensor classes(B, 1, first.dims[2], first.dims[1], first.dims[0]);
  const std::size_t sp = classes.spatial();
  for (int b = 0; b < B; ++b) {
    double* out = classes.sample_channel(b, 0);
    for (std::size_t f = 0; f < sp; ++f) {
      out[f] = static_cast<double>(label_ids::channel_of(samples[b].target.id_at(f)));
    }
  }
  return classes;
}

}  // namespace

Tensor hyp_foreground_mask(const Model& hyp, const Tensor& x) {
  const Tensor out = hyp.net.forward(x);
  Tensor mask(x.n(), 1, x.d(), x.h(), x.w());
  const std::size_t sp = mask.spatial();
  for (int n = 0; n < x.n(); ++n) {
    const double* bg = out.sample_channel(n, 0);
    const double* fg = out.sample_channel(n, 1);
    double* m = mask.sample_channel(n, 0);
    for (std::size_t f = 0; f < sp; ++f) m[f] = fg[f] > bg[f] ? 1.0 : 0.0;
  }
  return mask;
}

Tensor mask_image_channel(const Tensor& x, const Tensor& mask) {
  Tensor out = x;
  const std::size_t sp = x.spatial();
  for (int n = 0; n < x.n(); ++n) {
    double* img = out.sample_channel(n, 0);
    const double* m = mask.sample_channel(n, 0);
    for (std::size_t f = 0; f < sp; ++f) img[f] *= m[f];
  }
  return out;
}

double validation_mean_dice(const Model& sub, const Model& hyp,
                            const std::vector<ValPair>& validation) {
  if (validation.empty()) throw ConfigError("empty validation set");
  double acc = 0.0;
  for (const ValPair& pair : validation) {
    Tensor x = tensor_from_mcv(pair.input);
    const Tensor mask = hyp_foreground_mask(hyp, x);
    const Tensor out = sub.net.forward(mask_image_channel(x, mask));
    const std::size_t sp = out.spatial();
    const int C = out.c();
    std::vector<int> pred(sp, 0);
    for (std::size_t f = 0; f < sp; ++f) {
      int best = 0;
      double bv = out.data[f];
      for (int c = 1; c < C; ++c) {
        const double v = out.sample_channel(0, c)[f];
        if (v > bv) {
          bv = v;
          best = c;
        }
      }
      pred[f] = best;
    }
    double class_acc = 0.0;
    for (int c = 1; c < C; ++c) {
      std::size_t np = 0, nt = 0, ni = 0;
      for (std::size_t f = 0; f < sp; ++f) {
        const bool p = pred[f] == c;
        const bool t = label_ids::channel_of(pair.target.id_at(f)) == c;
        np += p;
        nt += t;
        ni += p && t;
      }
      class_acc += (np == 0 && nt == 0)
                       ? 1.0
                       : 2.0 * static_cast<double>(ni) / static_cast<double>(np + nt);
    }
    acc += class_acc / static_cast<double>(C - 1);
  }
  return acc / static_cast<double>(validation.size());
}

TrainReport train_hyp(Model& model, const SampleFactory& samples, const TrainConfig& tc) {
  TrainReport report;
  const int64_t start = model.adam.t;
  if (start >= tc.max_steps) return report;
  SampleQueue queue(samples, start * tc.batch, tc.max_steps * tc.batch, tc.workers,
                    std::max(2 * tc.batch, 4));
  for (int64_t step = start; step < tc.max_steps; ++step) {
    std::vector<SynthSample> batch;
    batch.reserve(tc.batch);
    for (int b = 0; b < tc.batch; ++b) batch.push_back(queue.next());
    HypBatch hb = assemble_hyp_batch(batch);

    UNet::Cache cache;
    const Tensor out = model.net.forward(hb.x, &cache);
    const Tensor seg = slice_channels(out, 0, 2);
    const Tensor dist = slice_channels(out, 2, 1);
    const HypLossResult loss =
        loss_hyp(seg, dist, hb.target_onehot, hb.dist, tc.alpha, tc.beta);
    const Tensor gout = concat_channels(loss.grad_seg_logits, loss.grad_dist_pred);
    model.net.zero_grad();
    model.net.backward(cache, gout);
    adam_step(model, tc.lr);

    report.log.push_back({step + 1, loss.total, 0.0, false});
    report.final_loss = loss.total;
    ++report.steps_run;
  }
  return report;
}

TrainReport train_sub(Model& model_sub, const Model& frozen_hyp,
                      const SampleFactory& samples, const std::vector<ValPair>& validation,
                      const TrainConfig& tc) {
  if (validation.empty()) throw ConfigError("train_sub: empty validation set");
  TrainReport report;
  const int64_t start = model_sub.adam.t;
  if (start >= tc.max_steps) return report;
  EarlyStopper stopper(tc.delta_min, tc.patience);
  SampleQueue queue(samples, start * tc.batch, tc.max_steps * tc.batch, tc.workers,
                    std::max(2 * tc.batch, 4));
  for (int64_t step = start; step < tc.max_steps; ++step) {
    std::vector<SynthSample> batch;
    batch.reserve(tc.batch);
    for (int b = 0; b < tc.batch; ++b) batch.push_back(queue.next());
    HypBatch hb = assemble_hyp_batch(batch);  // reuse x assembly
    const Tensor classes = assemble_sub_classes(batch);

    const Tensor mask = hyp_foreground_mask(frozen_hyp, hb.x);
    const Tensor x_sub = mask_image_channel(hb.x, mask);

    UNet::Cache cache;
    const Tensor out = model_sub.net.forward(x_sub, &cache);
    const SubLossResult loss = loss_sub(out, classes, tc.alpha, tc.beta);
    model_sub.net.zero_grad();
    model_sub.net.backward(cache, loss.grad_logits);
    adam_step(model_sub, tc.lr);

    LossRow row{step + 1, loss.total, 0.0, false};
    report.final_loss = loss.total;
    ++report.steps_run;

    if ((step + 1) % tc.eval_interval == 0) {
      row.val_dice = validation_mean_dice(model_sub, frozen_hyp, validation);
      row.has_val = true;
      const bool stop = stopper.observe(row.val_dice);
      report.best_val = stopper.best();
      report.log.push_back(row);
      if (stop) {
        report.early_stopped = true;
        report.stop_eval_index = stopper.evaluations() - 1;
        break;
      }
      continue;
    }
    report.log.push_back(row);
  }
  if (!report.early_stopped) report.best_val = stopper.best();
  return report;
}

}  // namespace hsx
