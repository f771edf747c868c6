#include "hsx/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hsx/rng.hpp"

namespace hsx {

GradCheckReport grad_check_coords(const std::function<double()>& loss, double* storage,
                                  const double* analytic,
                                  const std::vector<std::size_t>& coords, double h) {
  GradCheckReport rep;
  std::vector<double> numeric(coords.size());
  for (std::size_t t = 0; t < coords.size(); ++t) {
    const std::size_t f = coords[t];
    const double keep = storage[f];
    storage[f] = keep + h;
    const double up = loss();
    storage[f] = keep - h;
    const double down = loss();
    storage[f] = keep;
    numeric[t] = (up - down) / (2.0 * h);
  }
  double scale = 1e-12;
  for (std::size_t t = 0; t < coords.size(); ++t) {
    scale = std::max({scale, std::abs(analytic[coords[t]]), std::abs(numeric[t])});
  }
  rep.grad_scale = scale;
  for (std::size_t t = 0; t < coords.size(); ++t) {
    rep.max_rel_err =
        std::max(rep.max_rel_err, std::abs(analytic[coords[t]] - numeric[t]) / scale);
  }
  rep.checked = coords.size();
  return rep;
}

namespace {

std::vector<std::size_t> sample_coords(std::size_t size, int want, Rng& rng) {
  std::set<std::size_t> coords;
  if (static_cast<std::size_t>(want) >= size) {
    for (std::size_t f = 0; f < size; ++f) coords.insert(f);
  } else {
    while (static_cast<int>(coords.size()) < want) {
      coords.insert(static_cast<std::size_t>(rng.uniform_int(0, size - 1)));
    }
  }
  return {coords.begin(), coords.end()};
}

template <typename LossFn, typename GradFn>
GradCheckReport check_model(Model& model, Tensor x, const GradCheckConfig& gc,
                            LossFn&& loss_of_output, GradFn&& grad_of_output) {
  // Analytic pass.
  model.net.zero_grad();
  UNet::Cache cache;
  const Tensor out = model.net.forward(x, &cache);
  const Tensor gout = grad_of_output(out);
  const Tensor gx = model.net.backward(cache, gout);

  auto loss = [&]() { return loss_of_output(model.net.forward(x)); };

  Rng rng(gc.seed);
  GradCheckReport total;
  std::vector<double> analytic_all;
  std::vector<double> numeric_all;
  auto run = [&](double* storage, const double* analytic, std::size_t size) {
    const auto coords = sample_coords(size, gc.samples_per_tensor, rng);
    for (std::size_t f : coords) {
      const double keep = storage[f];
      storage[f] = keep + gc.h;
      const double up = loss();
      storage[f] = keep - gc.h;
      const double down = loss();
      storage[f] = keep;
      analytic_all.push_back(analytic[f]);
      numeric_all.push_back((up - down) / (2.0 * gc.h));
    }
  };

  for (Param* p : model.net.params()) {
    run(p->value.data(), p->grad.data(), p->size());
  }
  if (gc.check_input) {
    run(x.data.data(), gx.data.data(), x.numel());
  }

  double scale = 1e-12;
  for (std::size_t t = 0; t < analytic_all.size(); ++t) {
    scale = std::max({scale, std::abs(analytic_all[t]), std::abs(numeric_all[t])});
  }
  total.grad_scale = scale;
  for (std::size_t t = 0; t < analytic_all.size(); ++t) {
    total.max_rel_err =
        std::max(total.max_rel_err, std::abs(analytic_all[t] - numeric_all[t]) / scale);
  }
  total.checked = analytic_all.size();
  return total;
}

}  // namespace

GradCheckReport grad_check_hyp(Model& model, const Tensor& x, const Tensor& target_onehot,
                               const Tensor& dist_target, const GradCheckConfig& gc) {
  auto loss_of = [&](const Tensor& out) {
    const Tensor seg = slice_channels(out, 0, 2);
    const Tensor dist = slice_channels(out, 2, 1);
    return loss_hyp(seg, dist, target_onehot, dist_target).total;
  };
  auto grad_of = [&](const Tensor& out) {
    const Tensor seg = slice_channels(out, 0, 2);
    const Tensor dist = slice_channels(out, 2, 1);
    const HypLossResult r = loss_hyp(seg, dist, target_onehot, dist_target);
    return concat_channels(r.grad_seg_logits, r.grad_dist_pred);
  };
  return check_model(model, x, gc, loss_of, grad_of);
}

GradCheckReport grad_check_sub(Model& model, const Tensor& x, const Tensor& target_classes,
                               const GradCheckConfig& gc) {
  auto loss_of = [&](const Tensor& out) { return loss_sub(out, target_classes).total; };
  auto grad_of = [&](const Tensor& out) {
    return loss_sub(out, target_classes).grad_logits;
  };
  return check_model(model, x, gc, loss_of, grad_of);
}

}  // namespace hsx
