#pragma once

#include <memory>
#include <vector>

#include "hsx/layers.hpp"

namespace hsx {

struct UNetConfig {
  int levels = 5;
  std::vector<int> features = {24, 48, 96, 192, 384};
  int blocks_per_level = 2;
  int in_channels = 4;
  int out_channels = 3;  // 2 segmentation + 1 distance head; 13 for subregions
  int gn_max_groups = 8;
  bool coord_skip = true;
  int coord_channels = 3;  // trailing input channels carrying coordinates

  void validate() const;
  bool operator==(const UNetConfig&) const = default;
};

// groupnorm -> convolution -> ReLU.
struct ConvBlock {
  GroupNorm gn;
  Conv3d conv;

  struct Cache {
    Tensor x_in;
    GroupNorm::Ctx gn_ctx;
    Tensor gn_out;
    Tensor y;  // post-ReLU output
  };

  void init(const std::string& name, int in_c, int out_c, int kernel, int max_groups,
            Rng& rng);
  Tensor forward(Tensor x, Cache* cache) const;
  Tensor backward(Cache& cache, const Tensor& gy);
};

// Encoder-decoder with per-level skip concatenations, nearest+conv
// upsampling, a coordinate skip concatenating the raw coordinate input
// channels into the final block, and a 1x1x1 output projection.
class UNet {
 public:
  UNet() = default;
  explicit UNet(const UNetConfig& cfg, uint64_t seed);

  const UNetConfig& config() const { return cfg_; }

  // Parameters in declaration order; stable across runs and checkpoints.
  std::vector<Param*> params();
  std::vector<const Param*> params() const;
  Param* param(const std::string& name);
  std::size_t param_count() const;
  void zero_grad();

  struct Cache;
  Tensor forward(const Tensor& x, Cache* cache) const;
  Tensor forward(const Tensor& x) const;
  // Returns the input gradient; parameter grads accumulate in place.
  Tensor backward(Cache& cache, const Tensor& gout);

  struct Cache {
    Tensor x;  // network input (needed for the coordinate skip)
    std::vector<std::vector<ConvBlock::Cache>> enc;
    std::vector<MaxPool2::Ctx> pool;
    std::vector<std::array<int, 5>> skip_shapes;
    std::vector<ConvBlock::Cache> up;
    std::vector<std::array<int, 5>> up_in_shapes;  // before upsampling
    std::vector<std::vector<ConvBlock::Cache>> dec;
    ConvBlock::Cache final_block;
    Tensor out_conv_in;
  };

 private:
  UNetConfig cfg_;
  std::vector<std::vector<ConvBlock>> enc_;
  std::vector<ConvBlock> up_;   // index l: features[l+1] -> features[l]
  std::vector<std::vector<ConvBlock>> dec_;
  ConvBlock final_block_;
  Conv3d out_conv_;

  friend struct UNetAccess;
};

// Model couples the network with its optimizer state; the Adam step counter
// doubles as the training step counter for resume.
struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  int64_t t = 0;

  void ensure_shapes(const std::vector<Param*>& params);
  bool empty() const { return m.empty(); }
};

struct Model {
  UNet net;
  AdamState adam;
};

}  // namespace hsx
