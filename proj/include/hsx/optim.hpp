#pragma once

#include "hsx/unet.hpp"

namespace hsx {

// Bias-corrected Adam, applied in place; increments the step counter.
void adam_step(Model& model, double lr, double beta1 = 0.9, double beta2 = 0.999,
               double eps = 1e-8);

}  // namespace hsx
