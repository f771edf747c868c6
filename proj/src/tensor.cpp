#include "hsx/tensor.hpp"

#include <cstring>

namespace hsx {

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  if (a.shape[0] != b.shape[0] || a.shape[2] != b.shape[2] ||
      a.shape[3] != b.shape[3] || a.shape[4] != b.shape[4]) {
    throw ShapeError("concat_channels: non-channel dims differ");
  }
  Tensor out(a.n(), a.c() + b.c(), a.d(), a.h(), a.w());
  const std::size_t sp = a.spatial();
  for (int n = 0; n < a.n(); ++n) {
    std::memcpy(out.sample_channel(n, 0), a.sample_channel(n, 0),
                sizeof(double) * sp * a.c());
    std::memcpy(out.sample_channel(n, a.c()), b.sample_channel(n, 0),
                sizeof(double) * sp * b.c());
  }
  return out;
}

void split_channels(const Tensor& g, int c_first, Tensor* ga, Tensor* gb) {
  const int c_rest = g.c() - c_first;
  *ga = Tensor(g.n(), c_first, g.d(), g.h(), g.w());
  *gb = Tensor(g.n(), c_rest, g.d(), g.h(), g.w());
  const std::size_t sp = g.spatial();
  for (int n = 0; n < g.n(); ++n) {
    std::memcpy(ga->sample_channel(n, 0), g.sample_channel(n, 0),
                sizeof(double) * sp * c_first);
    std::memcpy(gb->sample_channel(n, 0), g.sample_channel(n, c_first),
                sizeof(double) * sp * c_rest);
  }
}

Tensor slice_channels(const Tensor& x, int c0, int count) {
  if (c0 < 0 || c0 + count > x.c()) throw ShapeError("slice_channels: out of range");
  Tensor out(x.n(), count, x.d(), x.h(), x.w());
  const std::size_t sp = x.spatial();
  for (int n = 0; n < x.n(); ++n) {
    std::memcpy(out.sample_channel(n, 0), x.sample_channel(n, c0),
                sizeof(double) * sp * count);
  }
  return out;
}

}  // namespace hsx
