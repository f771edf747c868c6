#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hsx/errors.hpp"

namespace hsx {

// Dense 5D array (N, C, D, H, W) of 64-bit reals, W fastest.
struct Tensor {
  std::array<int, 5> shape{0, 0, 0, 0, 0};
  std::vector<double> data;

  Tensor() = default;
  Tensor(int n, int c, int d, int h, int w)
      : shape{n, c, d, h, w},
        data(static_cast<std::size_t>(n) * c * d * h * w, 0.0) {}

  static Tensor zeros_like(const Tensor& o) {
    return Tensor(o.shape[0], o.shape[1], o.shape[2], o.shape[3], o.shape[4]);
  }

  std::size_t numel() const { return data.size(); }
  int n() const { return shape[0]; }
  int c() const { return shape[1]; }
  int d() const { return shape[2]; }
  int h() const { return shape[3]; }
  int w() const { return shape[4]; }
  std::size_t spatial() const {
    return static_cast<std::size_t>(shape[2]) * shape[3] * shape[4];
  }

  std::size_t index(int n_, int c_, int d_, int h_, int w_) const {
    return (((static_cast<std::size_t>(n_) * shape[1] + c_) * shape[2] + d_) *
                shape[3] +
            h_) *
               shape[4] +
           w_;
  }
  double at(int n_, int c_, int d_, int h_, int w_) const {
    return data[index(n_, c_, d_, h_, w_)];
  }
  double& at(int n_, int c_, int d_, int h_, int w_) {
    return data[index(n_, c_, d_, h_, w_)];
  }

  double* sample_channel(int n_, int c_) {
    return data.data() + (static_cast<std::size_t>(n_) * shape[1] + c_) * spatial();
  }
  const double* sample_channel(int n_, int c_) const {
    return data.data() + (static_cast<std::size_t>(n_) * shape[1] + c_) * spatial();
  }

  void require_shape(const std::array<int, 5>& s, const char* who) const {
    if (shape != s) {
      throw ShapeError(std::string(who) + ": unexpected tensor shape");
    }
  }
};

// Concatenates along the channel axis; all other dims must match.
Tensor concat_channels(const Tensor& a, const Tensor& b);

// Splits the channel-concat gradient back into the two parts.
void split_channels(const Tensor& g, int c_first, Tensor* ga, Tensor* gb);

// Extracts channels [c0, c0+count) as a new tensor.
Tensor slice_channels(const Tensor& x, int c0, int count);

}  // namespace hsx
