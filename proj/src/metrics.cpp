#include "hsx/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "hsx/distance.hpp"

namespace hsx {

double dice(const Volume& a, const Volume& b) {
  if (!a.same_grid(b)) throw GeometryError("dice: masks on different grids");
  if (!a.is_binary() || !b.is_binary()) throw MaskError("dice input must be binary");
  std::size_t na = 0, nb = 0, ni = 0;
  for (std::size_t f = 0; f < a.size(); ++f) {
    const bool fa = a.data[f] == 1.0, fb = b.data[f] == 1.0;
    na += fa;
    nb += fb;
    ni += fa && fb;
  }
  if (na == 0 && nb == 0) return 1.0;
  if (na == 0 || nb == 0) return 0.0;
  return 2.0 * static_cast<double>(ni) / static_cast<double>(na + nb);
}

namespace {

std::vector<std::size_t> foreground(const Volume& m) {
  std::vector<std::size_t> idx;
  for (std::size_t f = 0; f < m.size(); ++f) {
    if (m.data[f] == 1.0) idx.push_back(f);
  }
  return idx;
}

// Surface voxels: foreground with a face-adjacent background (grid edges do
// not count as background).
Volume surface_of(const Volume& m) {
  Volume out = Volume::zeros(m.dims, m.affine);
  const int nx = m.dims[0], ny = m.dims[1], nz = m.dims[2];
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        if (m.at(i, j, k) != 1.0) continue;
        const bool edge = (i > 0 && m.at(i - 1, j, k) == 0.0) ||
                          (i + 1 < nx && m.at(i + 1, j, k) == 0.0) ||
                          (j > 0 && m.at(i, j - 1, k) == 0.0) ||
                          (j + 1 < ny && m.at(i, j + 1, k) == 0.0) ||
                          (k > 0 && m.at(i, j, k - 1) == 0.0) ||
                          (k + 1 < nz && m.at(i, j, k + 1) == 0.0);
        if (edge) out.at(i, j, k) = 1.0;
      }
    }
  }
  // A set with no exposed face (fills the grid) is its own surface.
  if (foreground(out).empty()) out = m;
  return out;
}

Vec3 world_of(const Volume& m, std::size_t flat) {
  const int nx = m.dims[0], ny = m.dims[1];
  const int i = static_cast<int>(flat % nx);
  const int j = static_cast<int>((flat / nx) % ny);
  const int k = static_cast<int>(flat / (static_cast<std::size_t>(nx) * ny));
  return m.affine.apply({static_cast<double>(i), static_cast<double>(j),
                         static_cast<double>(k)});
}

// Mean over src voxels of the distance to the nearest dst voxel.
double directed_mean(const Volume& src, const Volume& dst) {
  const auto src_idx = foreground(src);
  const auto dst_idx = foreground(dst);
  if (src.affine.orthogonal_columns()) {
    std::vector<uint8_t> seed(dst.size(), 0);
    for (std::size_t f : dst_idx) seed[f] = 1;
    const auto d2 = detail::squared_edt(seed, dst.dims, dst.affine.spacing());
    double acc = 0.0;
    for (std::size_t f : src_idx) acc += std::sqrt(d2[f]);
    return acc / static_cast<double>(src_idx.size());
  }
  // Sheared affine: fall back to exact pairwise distances in world space.
  std::vector<Vec3> pts(dst_idx.size());
  for (std::size_t t = 0; t < dst_idx.size(); ++t) pts[t] = world_of(dst, dst_idx[t]);
  double acc = 0.0;
  for (std::size_t f : src_idx) {
    const Vec3 p = world_of(src, f);
    double best = std::numeric_limits<double>::max();
    for (const Vec3& q : pts) {
      const Vec3 d = p - q;
      best = std::min(best, dot(d, d));
    }
    acc += std::sqrt(best);
  }
  return acc / static_cast<double>(src_idx.size());
}

}  // namespace

double avd(const Volume& a, const Volume& b, const AvdOptions& opt) {
  if (!a.same_grid(b)) throw GeometryError("avd: masks on different grids");
  if (!a.is_binary() || !b.is_binary()) throw MaskError("avd input must be binary");
  Volume pa = a, pb = b;
  if (opt.points == AvdPoints::surface) {
    pa = surface_of(a);
    pb = surface_of(b);
  }
  if (foreground(pa).empty() || foreground(pb).empty()) {
    throw EmptySetError("avd requires nonempty masks");
  }
  const double ab = directed_mean(pa, pb);
  const double ba = directed_mean(pb, pa);
  return opt.mode == AvdMode::max_directed ? std::max(ab, ba) : 0.5 * (ab + ba);
}

std::map<int, double> region_volumes(const LabelMap& lm) {
  const double cell = std::abs(lm.vol.affine.det3());
  std::map<int, double> counts;
  for (const auto& [id, name] : lm.labels) counts[id] = 0.0;
  for (std::size_t f = 0; f < lm.vol.size(); ++f) {
    const int id = lm.id_at(f);
    if (id != 0) counts[id] += 1.0;
  }
  for (auto& [id, c] : counts) c *= cell;
  return counts;
}

}  // namespace hsx
