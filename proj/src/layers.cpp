#include "hsx/layers.hpp"

#include <cblas.h>

#include <algorithm>
#include <limits>
#include <cmath>
#include <cstring>

extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace hsx {

namespace {

// Pin BLAS to one thread: GEMMs here are small, the training pipeline runs
// its own worker threads, and a fixed thread count keeps runs bit-identical.
struct BlasThreadPin {
  BlasThreadPin() {
    if (openblas_set_num_threads) openblas_set_num_threads(1);
  }
} const blas_pin;

// im2col over a z-slab: rows = in_ch*k^3, cols = zs*H*W output voxels.
void im2col_slab(const double* x, int C, int D, int H, int W, int k, int z0, int zs,
                 double* col) {
  const int pad = k / 2;
  const std::size_t plane = static_cast<std::size_t>(H) * W;
  const std::size_t slab = static_cast<std::size_t>(zs) * plane;
  std::size_t row = 0;
  for (int c = 0; c < C; ++c) {
    const double* xc = x + static_cast<std::size_t>(c) * D * plane;
    for (int dz = 0; dz < k; ++dz) {
      for (int dy = 0; dy < k; ++dy) {
        for (int dx = 0; dx < k; ++dx, ++row) {
          double* out = col + row * slab;
          for (int z = z0; z < z0 + zs; ++z) {
            const int sz = z + dz - pad;
            if (sz < 0 || sz >= D) {
              std::memset(out, 0, sizeof(double) * plane);
              out += plane;
              continue;
            }
            const double* xz = xc + static_cast<std::size_t>(sz) * plane;
            for (int y = 0; y < H; ++y) {
              const int sy = y + dy - pad;
              if (sy < 0 || sy >= H) {
                std::memset(out, 0, sizeof(double) * W);
                out += W;
                continue;
              }
              const double* xrow = xz + static_cast<std::size_t>(sy) * W;
              const int sx0 = dx - pad;
              // Valid output x range for this kernel offset.
              const int lo = std::max(0, -sx0);
              const int hi = std::min(W, W - sx0);
              if (lo > 0) std::memset(out, 0, sizeof(double) * lo);
              if (hi > lo) {
                std::memcpy(out + lo, xrow + lo + sx0, sizeof(double) * (hi - lo));
              }
              if (hi < W) {
                std::memset(out + std::max(hi, 0), 0,
                            sizeof(double) * (W - std::max(hi, 0)));
              }
              out += W;
            }
          }
        }
      }
    }
  }
}

// col2im scatter-add, the exact adjoint of im2col_slab.
void col2im_slab(const double* col, int C, int D, int H, int W, int k, int z0, int zs,
                 double* gx) {
  const int pad = k / 2;
  const std::size_t plane = static_cast<std::size_t>(H) * W;
  const std::size_t slab = static_cast<std::size_t>(zs) * plane;
  std::size_t row = 0;
  for (int c = 0; c < C; ++c) {
    double* gc = gx + static_cast<std::size_t>(c) * D * plane;
    for (int dz = 0; dz < k; ++dz) {
      for (int dy = 0; dy < k; ++dy) {
        for (int dx = 0; dx < k; ++dx, ++row) {
          const double* in = col + row * slab;
          for (int z = z0; z < z0 + zs; ++z) {
            const int sz = z + dz - pad;
            if (sz < 0 || sz >= D) {
              in += plane;
              continue;
            }
            double* gz = gc + static_cast<std::size_t>(sz) * plane;
            for (int y = 0; y < H; ++y) {
              const int sy = y + dy - pad;
              if (sy < 0 || sy >= H) {
                in += W;
                continue;
              }
              double* grow = gz + static_cast<std::size_t>(sy) * W;
              const int sx0 = dx - pad;
              const int lo = std::max(0, -sx0);
              const int hi = std::min(W, W - sx0);
              for (int x = lo; x < hi; ++x) grow[x + sx0] += in[x];
              in += W;
            }
          }
        }
      }
    }
  }
}

constexpr int kSlabVoxels = 1 << 16;  // bounds im2col scratch memory

int slab_depth(int H, int W) {
  const int plane = H * W;
  return std::max(1, kSlabVoxels / std::max(1, plane));
}

}  // namespace

void Conv3d::init(const std::string& name, int in_c, int out_c, int k, Rng& rng) {
  in_ch = in_c;
  out_ch = out_c;
  kernel = k;
  weight.name = name + ".weight";
  weight.resize({out_c, in_c, k, k, k});
  bias.name = name + ".bias";
  bias.resize({out_c});
  const double fan_in = static_cast<double>(in_c) * k * k * k;
  const double scale = std::sqrt(2.0 / fan_in);
  for (double& w : weight.value) w = rng.normal(0.0, scale);
}

Tensor Conv3d::forward(const Tensor& x) const {
  if (x.c() != in_ch) throw ShapeError("conv: input channel mismatch");
  const int N = x.n(), D = x.d(), H = x.h(), W = x.w();
  const int K = in_ch * kernel * kernel * kernel;
  Tensor y(N, out_ch, D, H, W);
  const int zstep = slab_depth(H, W);
  std::vector<double> col(static_cast<std::size_t>(K) * zstep * H * W);
  const std::size_t plane = static_cast<std::size_t>(H) * W;
  for (int n = 0; n < N; ++n) {
    for (int z0 = 0; z0 < D; z0 += zstep) {
      const int zs = std::min(zstep, D - z0);
      const std::size_t P = static_cast<std::size_t>(zs) * plane;
      im2col_slab(x.sample_channel(n, 0), in_ch, D, H, W, kernel, z0, zs, col.data());
      // y[n, :, z0:z0+zs] = weight * col ; rows of y are spaced a full
      // channel apart, expressed through ldc.
      double* yslab = y.sample_channel(n, 0) + static_cast<std::size_t>(z0) * plane;
      cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, out_ch,
                  static_cast<int>(P), K, 1.0, weight.value.data(), K, col.data(),
                  static_cast<int>(P), 0.0, yslab, static_cast<int>(x.spatial()));
    }
    for (int co = 0; co < out_ch; ++co) {
      double* yc = y.sample_channel(n, co);
      const double b = bias.value[co];
      for (std::size_t f = 0; f < y.spatial(); ++f) yc[f] += b;
    }
  }
  return y;
}

Tensor Conv3d::backward(const Tensor& x, const Tensor& gy) {
  const int N = x.n(), D = x.d(), H = x.h(), W = x.w();
  const int K = in_ch * kernel * kernel * kernel;
  Tensor gx = Tensor::zeros_like(x);
  const int zstep = slab_depth(H, W);
  const std::size_t plane = static_cast<std::size_t>(H) * W;
  std::vector<double> col(static_cast<std::size_t>(K) * zstep * plane);
  std::vector<double> gcol(col.size());
  for (int n = 0; n < N; ++n) {
    for (int z0 = 0; z0 < D; z0 += zstep) {
      const int zs = std::min(zstep, D - z0);
      const std::size_t P = static_cast<std::size_t>(zs) * plane;
      im2col_slab(x.sample_channel(n, 0), in_ch, D, H, W, kernel, z0, zs, col.data());
      const double* gyslab =
          gy.sample_channel(n, 0) + static_cast<std::size_t>(z0) * plane;
      // dW += gy_slab * col^T
      cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, out_ch, K,
                  static_cast<int>(P), 1.0, gyslab, static_cast<int>(gy.spatial()),
                  col.data(), static_cast<int>(P), 1.0, weight.grad.data(), K);
      // dcol = W^T * gy_slab, then scatter back.
      cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans, K, static_cast<int>(P),
                  out_ch, 1.0, weight.value.data(), K, gyslab,
                  static_cast<int>(gy.spatial()), 0.0, gcol.data(),
                  static_cast<int>(P));
      col2im_slab(gcol.data(), in_ch, D, H, W, kernel, z0, zs,
                  gx.sample_channel(n, 0));
    }
    for (int co = 0; co < out_ch; ++co) {
      const double* gc = gy.sample_channel(n, co);
      double acc = 0.0;
      for (std::size_t f = 0; f < gy.spatial(); ++f) acc += gc[f];
      bias.grad[co] += acc;
    }
  }
  return gx;
}

int GroupNorm::pick_groups(int channels, int max_groups) {
  for (int g = std::min(max_groups, channels); g >= 1; --g) {
    if (channels % g == 0) return g;
  }
  return 1;
}

void GroupNorm::init(const std::string& name, int ch, int max_groups) {
  channels = ch;
  groups = pick_groups(ch, max_groups);
  gamma.name = name + ".gamma";
  gamma.resize({ch});
  std::fill(gamma.value.begin(), gamma.value.end(), 1.0);
  beta.name = name + ".beta";
  beta.resize({ch});
}

Tensor GroupNorm::forward(const Tensor& x, Ctx* ctx) const {
  if (x.c() != channels) throw ShapeError("groupnorm: channel mismatch");
  const int N = x.n();
  const int cpg = channels / groups;
  const std::size_t sp = x.spatial();
  const std::size_t m = sp * static_cast<std::size_t>(cpg);
  Tensor y = Tensor::zeros_like(x);
  if (ctx) {
    ctx->mean.assign(static_cast<std::size_t>(N) * groups, 0.0);
    ctx->inv_std.assign(static_cast<std::size_t>(N) * groups, 0.0);
  }
  for (int n = 0; n < N; ++n) {
    for (int g = 0; g < groups; ++g) {
      const double* base = x.sample_channel(n, g * cpg);
      double sum = 0.0, sq = 0.0;
      for (std::size_t f = 0; f < m; ++f) {
        sum += base[f];
        sq += base[f] * base[f];
      }
      const double mean = sum / static_cast<double>(m);
      const double var = std::max(0.0, sq / static_cast<double>(m) - mean * mean);
      const double istd = 1.0 / std::sqrt(var + kEps);
      if (ctx) {
        ctx->mean[static_cast<std::size_t>(n) * groups + g] = mean;
        ctx->inv_std[static_cast<std::size_t>(n) * groups + g] = istd;
      }
      for (int cc = 0; cc < cpg; ++cc) {
        const int c = g * cpg + cc;
        const double* xc = x.sample_channel(n, c);
        double* yc = y.sample_channel(n, c);
        const double a = gamma.value[c] * istd;
        const double b = beta.value[c] - gamma.value[c] * istd * mean;
        for (std::size_t f = 0; f < sp; ++f) yc[f] = a * xc[f] + b;
      }
    }
  }
  return y;
}

Tensor GroupNorm::backward(const Tensor& x, const Ctx& ctx, const Tensor& gy) {
  const int N = x.n();
  const int cpg = channels / groups;
  const std::size_t sp = x.spatial();
  const double m = static_cast<double>(sp) * cpg;
  Tensor gx = Tensor::zeros_like(x);
  for (int n = 0; n < N; ++n) {
    for (int g = 0; g < groups; ++g) {
      const double mean = ctx.mean[static_cast<std::size_t>(n) * groups + g];
      const double istd = ctx.inv_std[static_cast<std::size_t>(n) * groups + g];
      // Accumulate the two reduction terms over the group.
      double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
      for (int cc = 0; cc < cpg; ++cc) {
        const int c = g * cpg + cc;
        const double* xc = x.sample_channel(n, c);
        const double* gc = gy.sample_channel(n, c);
        const double gam = gamma.value[c];
        for (std::size_t f = 0; f < sp; ++f) {
          const double xhat = (xc[f] - mean) * istd;
          const double dxhat = gc[f] * gam;
          sum_dxhat += dxhat;
          sum_dxhat_xhat += dxhat * xhat;
          gamma.grad[c] += gc[f] * xhat;
          beta.grad[c] += gc[f];
        }
      }
      for (int cc = 0; cc < cpg; ++cc) {
        const int c = g * cpg + cc;
        const double* xc = x.sample_channel(n, c);
        const double* gc = gy.sample_channel(n, c);
        double* gxc = gx.sample_channel(n, c);
        const double gam = gamma.value[c];
        for (std::size_t f = 0; f < sp; ++f) {
          const double xhat = (xc[f] - mean) * istd;
          const double dxhat = gc[f] * gam;
          gxc[f] = istd * (dxhat - sum_dxhat / m - xhat * sum_dxhat_xhat / m);
        }
      }
    }
  }
  return gx;
}

Tensor relu(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.data) v = v > 0.0 ? v : 0.0;
  return y;
}

Tensor relu_backward(const Tensor& y, const Tensor& gy) {
  Tensor gx = gy;
  for (std::size_t f = 0; f < gx.data.size(); ++f) {
    if (y.data[f] <= 0.0) gx.data[f] = 0.0;
  }
  return gx;
}

Tensor MaxPool2::forward(const Tensor& x, Ctx* ctx) {
  const int N = x.n(), C = x.c(), D = x.d(), H = x.h(), W = x.w();
  const int OD = (D + 1) / 2, OH = (H + 1) / 2, OW = (W + 1) / 2;
  Tensor y(N, C, OD, OH, OW);
  if (ctx) {
    ctx->in_shape = x.shape;
    ctx->argmax.assign(y.numel(), 0);
  }
  std::size_t o = 0;
  for (int n = 0; n < N; ++n) {
    for (int c = 0; c < C; ++c) {
      for (int od = 0; od < OD; ++od) {
        for (int oh = 0; oh < OH; ++oh) {
          for (int ow = 0; ow < OW; ++ow, ++o) {
            double best = -std::numeric_limits<double>::infinity();
            int64_t best_idx = 0;
            for (int dz = 2 * od; dz < std::min(2 * od + 2, D); ++dz) {
              for (int dy = 2 * oh; dy < std::min(2 * oh + 2, H); ++dy) {
                for (int dx = 2 * ow; dx < std::min(2 * ow + 2, W); ++dx) {
                  const std::size_t f = x.index(n, c, dz, dy, dx);
                  if (x.data[f] > best) {
                    best = x.data[f];
                    best_idx = static_cast<int64_t>(f);
                  }
                }
              }
            }
            y.data[o] = best;
            if (ctx) ctx->argmax[o] = best_idx;
          }
        }
      }
    }
  }
  return y;
}

Tensor MaxPool2::backward(const Ctx& ctx, const Tensor& gy) {
  Tensor gx(ctx.in_shape[0], ctx.in_shape[1], ctx.in_shape[2], ctx.in_shape[3],
            ctx.in_shape[4]);
  for (std::size_t o = 0; o < gy.numel(); ++o) {
    gx.data[static_cast<std::size_t>(ctx.argmax[o])] += gy.data[o];
  }
  return gx;
}

Tensor upsample_nearest(const Tensor& x, int td, int th, int tw) {
  if (td != 2 * x.d() && td != 2 * x.d() - 1) throw ShapeError("upsample: bad target d");
  if (th != 2 * x.h() && th != 2 * x.h() - 1) throw ShapeError("upsample: bad target h");
  if (tw != 2 * x.w() && tw != 2 * x.w() - 1) throw ShapeError("upsample: bad target w");
  Tensor y(x.n(), x.c(), td, th, tw);
  std::size_t o = 0;
  for (int n = 0; n < x.n(); ++n) {
    for (int c = 0; c < x.c(); ++c) {
      for (int d = 0; d < td; ++d) {
        for (int h = 0; h < th; ++h) {
          for (int w = 0; w < tw; ++w, ++o) {
            y.data[o] = x.at(n, c, d / 2, h / 2, w / 2);
          }
        }
      }
    }
  }
  return y;
}

Tensor upsample_nearest_backward(const std::array<int, 5>& in_shape, const Tensor& gy) {
  Tensor gx(in_shape[0], in_shape[1], in_shape[2], in_shape[3], in_shape[4]);
  std::size_t o = 0;
  for (int n = 0; n < gy.n(); ++n) {
    for (int c = 0; c < gy.c(); ++c) {
      for (int d = 0; d < gy.d(); ++d) {
        for (int h = 0; h < gy.h(); ++h) {
          for (int w = 0; w < gy.w(); ++w, ++o) {
            gx.at(n, c, d / 2, h / 2, w / 2) += gy.data[o];
          }
        }
      }
    }
  }
  return gx;
}

}  // namespace hsx
