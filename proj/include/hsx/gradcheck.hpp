#pragma once

#include "hsx/losses.hpp"
#include "hsx/unet.hpp"

namespace hsx {

struct GradCheckConfig {
  double h = 1e-5;             // central difference step
  int samples_per_tensor = 8;  // coordinates checked per parameter tensor
  uint64_t seed = 0;
  bool check_input = true;
};

// max over checked coordinates of |analytic - numeric| divided by the
// largest gradient magnitude seen among them (floored at 1e-12), so dead
// coordinates cannot blow up the ratio.
struct GradCheckReport {
  double max_rel_err = 0.0;
  std::size_t checked = 0;
  double grad_scale = 0.0;
};

// Full-model check of the whole-structure loss: analytic parameter and
// input gradients against central finite differences of the scalar loss.
GradCheckReport grad_check_hyp(Model& model, const Tensor& x, const Tensor& target_onehot,
                               const Tensor& dist_target, const GradCheckConfig& gc = {});

// Same for the subregion loss.
GradCheckReport grad_check_sub(Model& model, const Tensor& x, const Tensor& target_classes,
                               const GradCheckConfig& gc = {});

// Building block shared with the layer-level tests: numeric vs analytic over
// explicit coordinates of one storage array.
GradCheckReport grad_check_coords(const std::function<double()>& loss, double* storage,
                                  const double* analytic,
                                  const std::vector<std::size_t>& coords, double h);

}  // namespace hsx
