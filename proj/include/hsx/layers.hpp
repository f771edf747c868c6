#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsx/rng.hpp"
#include "hsx/tensor.hpp"

namespace hsx {

// Named learnable array; grad has the same length as value.
struct Param {
  std::string name;
  std::vector<int> shape;
  std::vector<double> value;
  std::vector<double> grad;

  std::size_t size() const { return value.size(); }
  void resize(std::vector<int> s) {
    shape = std::move(s);
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    value.assign(n, 0.0);
    grad.assign(n, 0.0);
  }
};

// Shape-preserving 3D convolution, stride 1, zero padding kernel/2,
// kernel 1 or 3. Computed as im2col slabs against a BLAS GEMM.
struct Conv3d {
  int in_ch = 0;
  int out_ch = 0;
  int kernel = 3;
  Param weight;  // [out_ch][in_ch * kernel^3]
  Param bias;    // [out_ch]

  void init(const std::string& name, int in_c, int out_c, int k, Rng& rng);
  Tensor forward(const Tensor& x) const;
  // Accumulates into weight.grad / bias.grad; returns the input gradient.
  Tensor backward(const Tensor& x, const Tensor& gy);
};

// Per-(sample, group) normalization over grouped channels and all voxels,
// followed by per-channel affine. Group count: the largest g <= max_groups
// dividing the channel count.
struct GroupNorm {
  int channels = 0;
  int groups = 1;
  Param gamma;  // [channels]
  Param beta;   // [channels]
  static constexpr double kEps = 1e-5;

  struct Ctx {
    std::vector<double> mean;     // per (n, g)
    std::vector<double> inv_std;  // per (n, g)
  };

  void init(const std::string& name, int ch, int max_groups);
  static int pick_groups(int channels, int max_groups);
  Tensor forward(const Tensor& x, Ctx* ctx) const;
  Tensor backward(const Tensor& x, const Ctx& ctx, const Tensor& gy);
};

Tensor relu(const Tensor& x);
// gx from the forward output: y > 0 marks the active set.
Tensor relu_backward(const Tensor& y, const Tensor& gy);

// Factor-2 max pooling with ceil semantics on odd extents (edge windows
// shrink). The argmax index is recorded for routing the gradient; ties take
// the first maximum in scan order.
struct MaxPool2 {
  struct Ctx {
    std::array<int, 5> in_shape{};
    std::vector<int64_t> argmax;  // flat input index per output element
  };
  static Tensor forward(const Tensor& x, Ctx* ctx);
  static Tensor backward(const Ctx& ctx, const Tensor& gy);
};

// Nearest-neighbour upsampling to an explicit target grid; each target dim
// must be 2*in or 2*in-1 so source index is out/2.
Tensor upsample_nearest(const Tensor& x, int td, int th, int tw);
Tensor upsample_nearest_backward(const std::array<int, 5>& in_shape, const Tensor& gy);

}  // namespace hsx
