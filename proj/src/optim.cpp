#include "hsx/optim.hpp"

#include <cmath>

namespace hsx {

void adam_step(Model& model, double lr, double beta1, double beta2, double eps) {
  auto params = model.net.params();
  model.adam.ensure_shapes(params);
  model.adam.t += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(model.adam.t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(model.adam.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Param& p = *params[i];
    if (model.adam.m[i].size() != p.size()) {
      throw ShapeError("adam: state shape mismatch for " + p.name);
    }
    auto& m = model.adam.m[i];
    auto& v = model.adam.v[i];
    for (std::size_t f = 0; f < p.size(); ++f) {
      const double g = p.grad[f];
      m[f] = beta1 * m[f] + (1.0 - beta1) * g;
      v[f] = beta2 * v[f] + (1.0 - beta2) * g * g;
      const double mhat = m[f] / bc1;
      const double vhat = v[f] / bc2;
      p.value[f] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

}  // namespace hsx
