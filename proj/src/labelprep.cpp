#include "hsx/labelprep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "hsx/labels.hpp"
#include "hsx/volume_ops.hpp"

namespace hsx {

namespace detail {

std::vector<double> kmeans_lloyd(const std::vector<double>& values, int k, Rng& rng,
                                 std::vector<int>* assignment,
                                 std::vector<double>* wcss_trace) {
  const std::size_t n = values.size();

  // k-means++ seeding.
  std::vector<double> centers;
  centers.reserve(k);
  centers.push_back(values[static_cast<std::size_t>(rng.uniform_int(0, n - 1))]);
  std::vector<double> d2(n);
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::max();
      for (double c : centers) best = std::min(best, (values[i] - c) * (values[i] - c));
      d2[i] = best;
      total += best;
    }
    if (total <= 0.0) {
      // All remaining points coincide with a center; the caller guarantees
      // enough distinct values, so spread over distinct ones directly.
      std::set<double> distinct(values.begin(), values.end());
      centers.assign(distinct.begin(), distinct.end());
      centers.resize(k);
      break;
    }
    double target = rng.uniform() * total;
    std::size_t pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      target -= d2[i];
      if (target <= 0.0) {
        pick = i;
        break;
      }
    }
    centers.push_back(values[pick]);
  }

  std::vector<int> assign(n, -1);
  for (int iter = 0; iter < 300; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double bestd = std::numeric_limits<double>::max();
      for (int c = 0; c < k; ++c) {
        const double d = (values[i] - centers[c]) * (values[i] - centers[c]);
        if (d < bestd) {
          bestd = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (wcss_trace) {
      double wcss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        wcss += (values[i] - centers[assign[i]]) * (values[i] - centers[assign[i]]);
      }
      wcss_trace->push_back(wcss);
    }
    if (!changed) break;
    std::vector<double> sum(k, 0.0);
    std::vector<std::size_t> cnt(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sum[assign[i]] += values[i];
      ++cnt[assign[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (cnt[c] > 0) centers[c] = sum[c] / static_cast<double>(cnt[c]);
    }
  }

  // Relabel clusters by ascending center value.
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return centers[a] < centers[b]; });
  std::vector<int> rank(k);
  for (int r = 0; r < k; ++r) rank[order[r]] = r;
  if (assignment) {
    assignment->resize(n);
    for (std::size_t i = 0; i < n; ++i) (*assignment)[i] = rank[assign[i]];
  }
  std::vector<double> sorted(k);
  for (int r = 0; r < k; ++r) sorted[r] = centers[order[r]];
  return sorted;
}

}  // namespace detail

LabelMap kmeans_segment(const Volume& intensity, const Volume& mask, int k,
                        uint64_t seed) {
  if (!intensity.same_grid(mask)) throw GeometryError("kmeans: intensity/mask grid mismatch");
  if (!mask.is_binary()) throw MaskError("kmeans: mask must be binary");

  std::vector<double> values;
  std::vector<std::size_t> where;
  for (std::size_t f = 0; f < mask.size(); ++f) {
    if (mask.data[f] == 1.0) {
      values.push_back(intensity.data[f]);
      where.push_back(f);
    }
  }
  const std::set<double> distinct(values.begin(), values.end());
  if (static_cast<int>(distinct.size()) < k) {
    throw DegenerateClusterError("fewer distinct foreground intensities than k=" +
                                 std::to_string(k));
  }

  Rng rng(seed);
  std::vector<int> assign;
  detail::kmeans_lloyd(values, k, rng, &assign, nullptr);

  LabelMap out;
  out.vol = Volume::zeros(intensity.dims, intensity.affine);
  for (std::size_t t = 0; t < where.size(); ++t) {
    out.vol.data[where[t]] = static_cast<double>(assign[t] + 1);
  }
  for (int c = 1; c <= k; ++c) out.labels[c] = "tissue-" + std::to_string(c);
  return out;
}

LabelMap merge_labels(const LabelMap& auto_lm, const LabelMap& hypo_lm) {
  if (!auto_lm.vol.same_grid(hypo_lm.vol)) {
    throw GeometryError("merge_labels: grids differ");
  }
  LabelMap out = auto_lm;
  for (std::size_t f = 0; f < out.vol.size(); ++f) {
    const double h = hypo_lm.vol.data[f];
    if (h != 0.0) out.vol.data[f] = h;
  }
  for (const auto& [id, name] : hypo_lm.labels) out.labels[id] = name;
  return out;
}

namespace {

// Voxel axis whose world direction is most aligned with world x (left-right
// in RAS).
int sagittal_axis(const Affine& affine) {
  int best = 0;
  double best_score = -1.0;
  for (int c = 0; c < 3; ++c) {
    const Vec3 col = affine.column(c);
    const double score = std::abs(col[0]) / (norm(col) > 0 ? norm(col) : 1.0);
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return best;
}

struct LineHull {
  int lo = std::numeric_limits<int>::max();
  int hi = std::numeric_limits<int>::min();
  bool any() const { return hi >= lo; }
};

}  // namespace

MirrorResult mirror_hemisphere(const LabelMap& lm, int search_halfwidth_vox) {
  const Dims3& dims = lm.vol.dims;
  const int axis = sagittal_axis(lm.vol.affine);
  const int n_axis = dims[axis];

  // Collect foreground as (line index, axis coordinate) pairs; a line is a
  // 1D run along the sagittal axis.
  const int nb[2] = {dims[(axis + 1) % 3], dims[(axis + 2) % 3]};
  const std::size_t n_lines = static_cast<std::size_t>(nb[0]) * nb[1];
  std::vector<std::vector<int>> line_fg(n_lines);
  bool any_fg = false;
  for (int k = 0; k < dims[2]; ++k) {
    for (int j = 0; j < dims[1]; ++j) {
      for (int i = 0; i < dims[0]; ++i) {
        if (lm.vol.at(i, j, k) == 0.0) continue;
        any_fg = true;
        const int idx3[3] = {i, j, k};
        const std::size_t line = static_cast<std::size_t>(idx3[(axis + 1) % 3]) +
                                 static_cast<std::size_t>(nb[0]) * idx3[(axis + 2) % 3];
        line_fg[line].push_back(idx3[axis]);
      }
    }
  }
  if (!any_fg) throw MaskError("mirror_hemisphere: empty foreground");
  for (auto& v : line_fg) std::sort(v.begin(), v.end());

  // The objective for reflection i' = off - i: exact voxel overlaps plus the
  // per-line background gap between the hulls of original and reflection.
  auto objective = [&](int off) -> long {
    long total = 0;
    for (const auto& fg : line_fg) {
      if (fg.empty()) continue;
      // Overlap: i in fg and (off - i) in fg.
      for (int i : fg) {
        const int r = off - i;
        if (std::binary_search(fg.begin(), fg.end(), r)) ++total;
      }
      const int f_lo = fg.front(), f_hi = fg.back();
      const int g_lo = off - f_hi, g_hi = off - f_lo;
      if (g_lo > f_hi) {
        total += g_lo - f_hi - 1;
      } else if (f_lo > g_hi) {
        total += f_lo - g_hi - 1;
      }
    }
    return total;
  };

  // Base guesses: reflect about each face of the global foreground extent.
  int glo = std::numeric_limits<int>::max(), ghi = std::numeric_limits<int>::min();
  for (const auto& fg : line_fg) {
    if (fg.empty()) continue;
    glo = std::min(glo, fg.front());
    ghi = std::max(ghi, fg.back());
  }
  std::set<int> candidates;
  for (int base : {2 * ghi + 1, 2 * glo - 1}) {
    for (int d = -search_halfwidth_vox; d <= search_halfwidth_vox; ++d) {
      candidates.insert(base + d);
    }
  }

  int best_off = 2 * ghi + 1;
  long best_obj = std::numeric_limits<long>::max();
  for (int off : candidates) {
    const long obj = objective(off);
    if (obj < best_obj) {
      best_obj = obj;
      best_off = off;
    }
  }

  MirrorResult res;
  res.axis = axis;
  res.offset = best_off;
  res.objective = best_obj;
  res.map = lm;
  for (int k = 0; k < dims[2]; ++k) {
    for (int j = 0; j < dims[1]; ++j) {
      for (int i = 0; i < dims[0]; ++i) {
        const int id = lm.id_at(i, j, k);
        if (id == 0) continue;
        int idx3[3] = {i, j, k};
        idx3[axis] = best_off - idx3[axis];
        if (idx3[axis] < 0 || idx3[axis] >= n_axis) continue;
        if (res.map.vol.at(idx3[0], idx3[1], idx3[2]) == 0.0) {
          res.map.vol.at(idx3[0], idx3[1], idx3[2]) =
              static_cast<double>(label_ids::contralateral(id));
        }
      }
    }
  }
  for (const auto& [id, name] : lm.labels) {
    const int c = label_ids::contralateral(id);
    if (!res.map.labels.count(c)) {
      const auto it = band_names().find(c);
      res.map.labels[c] = it != band_names().end() ? it->second
                                                   : "label-" + std::to_string(c);
    }
  }
  return res;
}

Volume synth_reference_image(const LabelMap& lm, const IntensityTable& table,
                             uint64_t seed) {
  for (int id : lm.distinct_ids()) {
    if (!table.stats.count(id)) {
      throw LabelError("intensity table misses id " + std::to_string(id));
    }
  }
  Rng rng(seed);
  Volume out(lm.vol.dims, lm.vol.affine);
  const bool has_bg = table.stats.count(0) > 0;
  for (std::size_t f = 0; f < out.size(); ++f) {
    const int id = lm.id_at(f);
    if (id == 0 && !has_bg) {
      out.data[f] = 0.0;
      continue;
    }
    const auto& [mean, stddev] = table.stats.at(id);
    out.data[f] = rng.normal(mean, stddev);
  }
  return out;
}

CoordVolume attach_coords(const Dims3& dims, const Affine& grid_affine,
                          const Affine& mni_affine) {
  if (!mni_affine.invertible()) throw GeometryError("mni affine is singular");
  const Affine q = mni_affine * grid_affine;
  CoordVolume out(3, dims, grid_affine);
  const std::size_t n = out.voxels();
  std::size_t f = 0;
  for (int k = 0; k < dims[2]; ++k) {
    for (int j = 0; j < dims[1]; ++j) {
      for (int i = 0; i < dims[0]; ++i, ++f) {
        const Vec3 mni = q.apply({static_cast<double>(i), static_cast<double>(j),
                                  static_cast<double>(k)});
        for (int c = 0; c < 3; ++c) {
          out.data[static_cast<std::size_t>(c) * n + f] =
              std::clamp(mni[c] / 100.0, -1.0, 1.0);
        }
      }
    }
  }
  return out;
}

CoordVolume attach_coords(const Volume& grid, const Affine& mni_affine) {
  return attach_coords(grid.dims, grid.affine, mni_affine);
}

std::pair<LabelMap, CoordVolume> crop_training_pair(const LabelMap& full,
                                                    const CoordVolume& coords,
                                                    const std::vector<int>& hypo_ids,
                                                    const Dims3& model_dims) {
  if (full.vol.dims != coords.dims || !full.vol.affine.almost_equal(coords.affine)) {
    throw GeometryError("crop_training_pair: label/coord grids differ");
  }
  const std::set<int> want(hypo_ids.begin(), hypo_ids.end());
  double ci = 0.0, cj = 0.0, ck = 0.0;
  std::size_t count = 0;
  for (int k = 0; k < full.vol.dims[2]; ++k) {
    for (int j = 0; j < full.vol.dims[1]; ++j) {
      for (int i = 0; i < full.vol.dims[0]; ++i) {
        if (want.count(full.id_at(i, j, k))) {
          ci += i;
          cj += j;
          ck += k;
          ++count;
        }
      }
    }
  }
  if (count == 0) throw MaskError("crop_training_pair: no structure voxels");
  const double inv = 1.0 / static_cast<double>(count);
  const Dims3 center = {static_cast<int>(std::llround(ci * inv)),
                        static_cast<int>(std::llround(cj * inv)),
                        static_cast<int>(std::llround(ck * inv))};
  return {crop(full, center, model_dims), crop(coords, center, model_dims)};
}

}  // namespace hsx
