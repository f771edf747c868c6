#include "hsx/volume_ops.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hsx {

namespace {

// Snap near-integer sample coordinates so that resampling a grid onto itself
// is exactly the identity despite affine round-trip rounding.
inline double snap(double x) {
  const double r = std::nearbyint(x);
  return std::abs(x - r) < 1e-9 ? r : x;
}

inline double sample_nearest(const Volume& v, double x, double y, double z) {
  const int i = static_cast<int>(std::nearbyint(x));
  const int j = static_cast<int>(std::nearbyint(y));
  const int k = static_cast<int>(std::nearbyint(z));
  return v.in_bounds(i, j, k) ? v.at(i, j, k) : 0.0;
}

inline double sample_trilinear(const Volume& v, double x, double y, double z) {
  x = snap(x);
  y = snap(y);
  z = snap(z);
  const int i0 = static_cast<int>(std::floor(x));
  const int j0 = static_cast<int>(std::floor(y));
  const int k0 = static_cast<int>(std::floor(z));
  const double fx = x - i0, fy = y - j0, fz = z - k0;
  double acc = 0.0;
  for (int dk = 0; dk < 2; ++dk) {
    const double wz = dk ? fz : 1.0 - fz;
    if (wz == 0.0) continue;
    for (int dj = 0; dj < 2; ++dj) {
      const double wy = dj ? fy : 1.0 - fy;
      if (wy == 0.0) continue;
      for (int di = 0; di < 2; ++di) {
        const double wx = di ? fx : 1.0 - fx;
        if (wx == 0.0) continue;
        const int i = i0 + di, j = j0 + dj, k = k0 + dk;
        if (v.in_bounds(i, j, k)) acc += wx * wy * wz * v.at(i, j, k);
      }
    }
  }
  return acc;
}

}  // namespace

Volume resample(const Volume& vol, Dims3 target_dims, const Affine& target_affine,
                Interp interp) {
  if (!target_affine.invertible()) throw GeometryError("target affine is singular");
  // Maps target index -> source index directly.
  const Affine m = vol.affine.inverse() * target_affine;
  Volume out(target_dims, target_affine);
  std::size_t f = 0;
  for (int k = 0; k < target_dims[2]; ++k) {
    for (int j = 0; j < target_dims[1]; ++j) {
      for (int i = 0; i < target_dims[0]; ++i, ++f) {
        const Vec3 u = m.apply({static_cast<double>(i), static_cast<double>(j),
                                static_cast<double>(k)});
        out.data[f] = interp == Interp::nearest ? sample_nearest(vol, u[0], u[1], u[2])
                                                : sample_trilinear(vol, u[0], u[1], u[2]);
      }
    }
  }
  return out;
}

LabelMap resample(const LabelMap& lm, Dims3 target_dims, const Affine& target_affine,
                  Interp interp) {
  if (interp != Interp::nearest) {
    throw LabelInterpError("label maps require nearest interpolation");
  }
  LabelMap out;
  out.vol = resample(lm.vol, target_dims, target_affine, Interp::nearest);
  out.labels = lm.labels;
  return out;
}

MultiChannelVolume resample(const MultiChannelVolume& mc, Dims3 target_dims,
                            const Affine& target_affine, Interp interp) {
  MultiChannelVolume out(mc.channels, target_dims, target_affine);
  for (int c = 0; c < mc.channels; ++c) {
    out.set_channel(c, resample(mc.channel(c), target_dims, target_affine, interp));
  }
  return out;
}

namespace {

Affine cropped_affine(const Affine& a, const Dims3& start) {
  Affine out = a;
  const Vec3 shift = a.apply_vector({static_cast<double>(start[0]),
                                     static_cast<double>(start[1]),
                                     static_cast<double>(start[2])});
  out.set_translation(a.translation() + shift);
  return out;
}

}  // namespace

Volume crop(const Volume& vol, Dims3 center_index, Dims3 size) {
  Dims3 start;
  for (int a = 0; a < 3; ++a) start[a] = center_index[a] - size[a] / 2;
  Volume out(size, cropped_affine(vol.affine, start));
  std::size_t f = 0;
  for (int k = 0; k < size[2]; ++k) {
    for (int j = 0; j < size[1]; ++j) {
      for (int i = 0; i < size[0]; ++i, ++f) {
        const int si = start[0] + i, sj = start[1] + j, sk = start[2] + k;
        if (vol.in_bounds(si, sj, sk)) out.data[f] = vol.at(si, sj, sk);
      }
    }
  }
  return out;
}

LabelMap crop(const LabelMap& lm, Dims3 center_index, Dims3 size) {
  LabelMap out;
  out.vol = crop(lm.vol, center_index, size);
  out.labels = lm.labels;
  return out;
}

MultiChannelVolume crop(const MultiChannelVolume& mc, Dims3 center_index, Dims3 size) {
  Dims3 start;
  for (int a = 0; a < 3; ++a) start[a] = center_index[a] - size[a] / 2;
  MultiChannelVolume out(mc.channels, size, cropped_affine(mc.affine, start));
  for (int c = 0; c < mc.channels; ++c) {
    std::size_t f = 0;
    const std::size_t base = static_cast<std::size_t>(c) * out.voxels();
    for (int k = 0; k < size[2]; ++k) {
      for (int j = 0; j < size[1]; ++j) {
        for (int i = 0; i < size[0]; ++i, ++f) {
          const int si = start[0] + i, sj = start[1] + j, sk = start[2] + k;
          if (si >= 0 && si < mc.dims[0] && sj >= 0 && sj < mc.dims[1] && sk >= 0 &&
              sk < mc.dims[2]) {
            out.data[base + f] = mc.at(c, si, sj, sk);
          }
        }
      }
    }
  }
  return out;
}

MultiChannelVolume one_hot(const LabelMap& lm, const std::vector<int>& label_set) {
  const int v_channels = static_cast<int>(label_set.size()) + 1;
  MultiChannelVolume out(v_channels, lm.vol.dims, lm.vol.affine);
  std::map<int, int> channel_of;
  channel_of[0] = 0;
  for (std::size_t i = 0; i < label_set.size(); ++i) {
    channel_of[label_set[i]] = static_cast<int>(i) + 1;
  }
  const std::size_t n = lm.vol.size();
  for (std::size_t f = 0; f < n; ++f) {
    const int id = lm.id_at(f);
    const auto it = channel_of.find(id);
    if (it == channel_of.end()) {
      throw LabelError("label id " + std::to_string(id) + " not in label set");
    }
    out.data[static_cast<std::size_t>(it->second) * n + f] = 1.0;
  }
  return out;
}

LabelMap argmax_labels(const MultiChannelVolume& mc, const std::vector<int>& label_set) {
  if (mc.channels != static_cast<int>(label_set.size()) + 1) {
    throw LabelError("channel count does not match label set");
  }
  LabelMap out;
  out.vol = Volume::zeros(mc.dims, mc.affine);
  const std::size_t n = mc.voxels();
  for (std::size_t f = 0; f < n; ++f) {
    int best = 0;
    double best_v = mc.data[f];
    for (int c = 1; c < mc.channels; ++c) {
      const double v = mc.data[static_cast<std::size_t>(c) * n + f];
      if (v > best_v) {
        best_v = v;
        best = c;
      }
    }
    out.vol.data[f] = best == 0 ? 0.0 : static_cast<double>(label_set[best - 1]);
  }
  for (int id : label_set) out.labels[id] = "label-" + std::to_string(id);
  return out;
}

Volume minmax_rescale(const Volume& vol) {
  Volume out = vol;
  if (vol.data.empty()) return out;
  const auto [mn, mx] = std::minmax_element(vol.data.begin(), vol.data.end());
  const double lo = *mn, hi = *mx;
  if (hi <= lo) {
    std::fill(out.data.begin(), out.data.end(), 0.0);
    return out;
  }
  const double inv = 1.0 / (hi - lo);
  for (double& v : out.data) v = (v - lo) * inv;
  return out;
}

}  // namespace hsx
