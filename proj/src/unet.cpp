#include "hsx/unet.hpp"

#include <algorithm>

namespace hsx {

void UNetConfig::validate() const {
  if (levels < 2) throw ConfigError("unet: need at least 2 levels");
  if (static_cast<int>(features.size()) != levels) {
    throw ConfigError("unet: features length must equal levels");
  }
  for (int f : features) {
    if (f < 1) throw ConfigError("unet: nonpositive feature count");
  }
  if (in_channels < 1 || out_channels < 1) throw ConfigError("unet: bad channel counts");
  if (coord_skip && coord_channels >= in_channels) {
    throw ConfigError("unet: coordinate channels must be a strict subset of input");
  }
  if (blocks_per_level < 1) throw ConfigError("unet: need at least one block per level");
}

void ConvBlock::init(const std::string& name, int in_c, int out_c, int kernel,
                     int max_groups, Rng& rng) {
  gn.init(name + ".gn", in_c, max_groups);
  conv.init(name + ".conv", in_c, out_c, kernel, rng);
}

Tensor ConvBlock::forward(Tensor x, Cache* cache) const {
  Cache local;
  Cache& cc = cache ? *cache : local;
  cc.x_in = std::move(x);
  cc.gn_out = gn.forward(cc.x_in, &cc.gn_ctx);
  Tensor y = relu(conv.forward(cc.gn_out));
  cc.y = y;
  return y;
}

Tensor ConvBlock::backward(Cache& cache, const Tensor& gy) {
  const Tensor g_pre = relu_backward(cache.y, gy);
  const Tensor g_gn_out = conv.backward(cache.gn_out, g_pre);
  return gn.backward(cache.x_in, cache.gn_ctx, g_gn_out);
}

UNet::UNet(const UNetConfig& cfg, uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(seed);
  enc_.resize(cfg.levels);
  for (int l = 0; l < cfg.levels; ++l) {
    enc_[l].resize(cfg.blocks_per_level);
    for (int b = 0; b < cfg.blocks_per_level; ++b) {
      const int in_c = b == 0 ? (l == 0 ? cfg.in_channels : cfg.features[l - 1])
                              : cfg.features[l];
      enc_[l][b].init("enc." + std::to_string(l) + ".b" + std::to_string(b), in_c,
                      cfg.features[l], 3, cfg.gn_max_groups, rng);
    }
  }
  up_.resize(cfg.levels - 1);
  dec_.resize(cfg.levels - 1);
  for (int l = cfg.levels - 2; l >= 0; --l) {
    up_[l].init("up." + std::to_string(l), cfg.features[l + 1], cfg.features[l], 3,
                cfg.gn_max_groups, rng);
    dec_[l].resize(cfg.blocks_per_level);
    for (int b = 0; b < cfg.blocks_per_level; ++b) {
      const int in_c = b == 0 ? 2 * cfg.features[l] : cfg.features[l];
      dec_[l][b].init("dec." + std::to_string(l) + ".b" + std::to_string(b), in_c,
                      cfg.features[l], 3, cfg.gn_max_groups, rng);
    }
  }
  const int final_in = cfg.features[0] + (cfg.coord_skip ? cfg.coord_channels : 0);
  final_block_.init("final", final_in, cfg.features[0], 3, cfg.gn_max_groups, rng);
  out_conv_.init("out", cfg.features[0], cfg.out_channels, 1, rng);
}

std::vector<Param*> UNet::params() {
  std::vector<Param*> out;
  auto add_block = [&](ConvBlock& blk) {
    out.push_back(&blk.gn.gamma);
    out.push_back(&blk.gn.beta);
    out.push_back(&blk.conv.weight);
    out.push_back(&blk.conv.bias);
  };
  for (auto& level : enc_) {
    for (auto& blk : level) add_block(blk);
  }
  for (int l = cfg_.levels - 2; l >= 0; --l) {
    add_block(up_[l]);
    for (auto& blk : dec_[l]) add_block(blk);
  }
  add_block(final_block_);
  out.push_back(&out_conv_.weight);
  out.push_back(&out_conv_.bias);
  return out;
}

std::vector<const Param*> UNet::params() const {
  auto mut = const_cast<UNet*>(this)->params();
  return {mut.begin(), mut.end()};
}

Param* UNet::param(const std::string& name) {
  for (Param* p : params()) {
    if (p->name == name) return p;
  }
  return nullptr;
}

std::size_t UNet::param_count() const {
  std::size_t n = 0;
  for (const Param* p : params()) n += p->size();
  return n;
}

void UNet::zero_grad() {
  for (Param* p : params()) std::fill(p->grad.begin(), p->grad.end(), 0.0);
}

Tensor UNet::forward(const Tensor& x, Cache* cache) const {
  if (x.c() != cfg_.in_channels) throw ShapeError("unet: input channel mismatch");
  Cache local;
  Cache& cc = cache ? *cache : local;
  cc.x = x;
  cc.enc.assign(cfg_.levels, {});
  cc.pool.assign(cfg_.levels - 1, {});
  cc.skip_shapes.assign(cfg_.levels - 1, {});
  cc.up.assign(cfg_.levels - 1, {});
  cc.up_in_shapes.assign(cfg_.levels - 1, {});
  cc.dec.assign(cfg_.levels - 1, {});

  Tensor cur = x;
  std::vector<Tensor> skips(cfg_.levels - 1);
  for (int l = 0; l < cfg_.levels; ++l) {
    cc.enc[l].resize(cfg_.blocks_per_level);
    for (int b = 0; b < cfg_.blocks_per_level; ++b) {
      cur = enc_[l][b].forward(std::move(cur), &cc.enc[l][b]);
    }
    if (l < cfg_.levels - 1) {
      skips[l] = cur;
      cc.skip_shapes[l] = cur.shape;
      cur = MaxPool2::forward(cur, &cc.pool[l]);
    }
  }
  for (int l = cfg_.levels - 2; l >= 0; --l) {
    cc.up_in_shapes[l] = cur.shape;
    cur = upsample_nearest(cur, cc.skip_shapes[l][2], cc.skip_shapes[l][3],
                           cc.skip_shapes[l][4]);
    cur = up_[l].forward(std::move(cur), &cc.up[l]);
    cur = concat_channels(skips[l], cur);
    cc.dec[l].resize(cfg_.blocks_per_level);
    for (int b = 0; b < cfg_.blocks_per_level; ++b) {
      cur = dec_[l][b].forward(std::move(cur), &cc.dec[l][b]);
    }
  }
  if (cfg_.coord_skip) {
    const Tensor coords =
        slice_channels(x, cfg_.in_channels - cfg_.coord_channels, cfg_.coord_channels);
    cur = concat_channels(std::move(cur), coords);
  }
  cur = final_block_.forward(std::move(cur), &cc.final_block);
  cc.out_conv_in = cur;
  return out_conv_.forward(cur);
}

Tensor UNet::forward(const Tensor& x) const { return forward(x, nullptr); }

Tensor UNet::backward(Cache& cc, const Tensor& gout) {
  Tensor gx_input(cc.x.shape[0], cc.x.shape[1], cc.x.shape[2], cc.x.shape[3],
                  cc.x.shape[4]);

  Tensor g = out_conv_.backward(cc.out_conv_in, gout);
  g = final_block_.backward(cc.final_block, g);
  if (cfg_.coord_skip) {
    Tensor g_dec, g_coords;
    split_channels(g, cfg_.features[0], &g_dec, &g_coords);
    const int c0 = cfg_.in_channels - cfg_.coord_channels;
    for (int n = 0; n < gx_input.n(); ++n) {
      for (int c = 0; c < cfg_.coord_channels; ++c) {
        double* dst = gx_input.sample_channel(n, c0 + c);
        const double* src = g_coords.sample_channel(n, c);
        for (std::size_t f = 0; f < gx_input.spatial(); ++f) dst[f] += src[f];
      }
    }
    g = std::move(g_dec);
  }

  std::vector<Tensor> g_skips(cfg_.levels - 1);
  for (int l = 0; l < cfg_.levels - 1; ++l) {
    for (int b = cfg_.blocks_per_level - 1; b >= 0; --b) {
      g = dec_[l][b].backward(cc.dec[l][b], g);
    }
    Tensor g_skip, g_up;
    split_channels(g, cfg_.features[l], &g_skip, &g_up);
    g_skips[l] = std::move(g_skip);
    g_up = up_[l].backward(cc.up[l], g_up);
    g = upsample_nearest_backward(cc.up_in_shapes[l], g_up);
  }

  for (int l = cfg_.levels - 1; l >= 0; --l) {
    if (l < cfg_.levels - 1) {
      g = MaxPool2::backward(cc.pool[l], g);
      for (std::size_t f = 0; f < g.numel(); ++f) g.data[f] += g_skips[l].data[f];
    }
    for (int b = cfg_.blocks_per_level - 1; b >= 0; --b) {
      g = enc_[l][b].backward(cc.enc[l][b], g);
    }
  }
  for (std::size_t f = 0; f < gx_input.numel(); ++f) gx_input.data[f] += g.data[f];
  return gx_input;
}

void AdamState::ensure_shapes(const std::vector<Param*>& params) {
  if (!m.empty()) return;
  m.resize(params.size());
  v.resize(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i].assign(params[i]->size(), 0.0);
    v[i].assign(params[i]->size(), 0.0);
  }
}

}  // namespace hsx
