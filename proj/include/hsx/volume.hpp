#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hsx/errors.hpp"
#include "hsx/geometry.hpp"

namespace hsx {

using Dims3 = std::array<int, 3>;

inline std::size_t voxel_count(const Dims3& d) {
  return static_cast<std::size_t>(d[0]) * d[1] * d[2];
}

// Geometry-aware 3D scalar grid. Values are 64-bit reals; the affine maps
// voxel index (i,j,k) to world mm (RAS). Index i is fastest in memory,
// matching NIfTI file order.
struct Volume {
  Dims3 dims{0, 0, 0};
  std::vector<double> data;
  Affine affine;

  Volume() = default;
  Volume(Dims3 d, Affine a) : dims(d), data(voxel_count(d), 0.0), affine(a) {}

  static Volume zeros(Dims3 d, Affine a) { return Volume(d, a); }
  static Volume full(Dims3 d, Affine a, double v) {
    Volume out(d, a);
    std::fill(out.data.begin(), out.data.end(), v);
    return out;
  }

  std::size_t size() const { return data.size(); }

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims[1]) * k);
  }

  double at(int i, int j, int k) const { return data[index(i, j, k)]; }
  double& at(int i, int j, int k) { return data[index(i, j, k)]; }

  bool in_bounds(int i, int j, int k) const {
    return i >= 0 && i < dims[0] && j >= 0 && j < dims[1] && k >= 0 && k < dims[2];
  }

  Vec3 spacing() const { return affine.spacing(); }

  Vec3 index_to_world(const Vec3& idx) const { return affine.apply(idx); }

  bool same_grid(const Volume& o, double tol = 1e-9) const {
    return dims == o.dims && affine.almost_equal(o.affine, tol);
  }

  // True when every value is exactly 0 or 1.
  bool is_binary() const {
    for (double v : data) {
      if (v != 0.0 && v != 1.0) return false;
    }
    return true;
  }
};

// Integer-valued Volume plus an id -> name dictionary. Background is id 0
// and never appears in the dictionary.
struct LabelMap {
  Volume vol;
  std::map<int, std::string> labels;

  int id_at(int i, int j, int k) const {
    return static_cast<int>(std::llround(vol.at(i, j, k)));
  }
  int id_at(std::size_t flat) const {
    return static_cast<int>(std::llround(vol.data[flat]));
  }
  void set_id(int i, int j, int k, int id) {
    vol.at(i, j, k) = static_cast<double>(id);
  }

  std::vector<int> distinct_ids() const;

  // Enforces the type invariant: every nonzero value has a dictionary entry.
  void validate() const;

  // Binary mask of voxels whose id is in `ids`.
  Volume mask_of(const std::vector<int>& ids) const;
};

// C-channel volume sharing one grid; channel-major layout.
struct MultiChannelVolume {
  int channels = 0;
  Dims3 dims{0, 0, 0};
  std::vector<double> data;
  Affine affine;

  MultiChannelVolume() = default;
  MultiChannelVolume(int c, Dims3 d, Affine a)
      : channels(c), dims(d), data(static_cast<std::size_t>(c) * voxel_count(d), 0.0), affine(a) {}

  std::size_t voxels() const { return voxel_count(dims); }

  std::size_t index(int c, int i, int j, int k) const {
    return static_cast<std::size_t>(c) * voxels() +
           static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims[1]) * k);
  }

  double at(int c, int i, int j, int k) const { return data[index(c, i, j, k)]; }
  double& at(int c, int i, int j, int k) { return data[index(c, i, j, k)]; }

  double* channel_ptr(int c) { return data.data() + static_cast<std::size_t>(c) * voxels(); }
  const double* channel_ptr(int c) const {
    return data.data() + static_cast<std::size_t>(c) * voxels();
  }

  Volume channel(int c) const {
    Volume out({dims[0], dims[1], dims[2]}, affine);
    const double* p = channel_ptr(c);
    std::copy(p, p + voxels(), out.data.begin());
    return out;
  }

  void set_channel(int c, const Volume& v) {
    std::copy(v.data.begin(), v.data.end(), channel_ptr(c));
  }

  bool same_grid(const MultiChannelVolume& o, double tol = 1e-9) const {
    return dims == o.dims && affine.almost_equal(o.affine, tol);
  }
};

}  // namespace hsx
