#include <cmath>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "hsx/labelprep.hpp"
#include "hsx/labels.hpp"

using namespace hsx;

TEST_SUITE_BEGIN("labelprep");

TEST_CASE("kmeans splits two crisp intensity groups exactly") {
  Volume img({6, 1, 1}, Affine::identity());
  img.data = {0, 0, 0, 10, 10, 10};
  const Volume mask = Volume::full({6, 1, 1}, Affine::identity(), 1.0);
  const LabelMap lm = kmeans_segment(img, mask, 2, 1);
  // Label order follows ascending center value: zeros -> 1, tens -> 2.
  for (int i = 0; i < 3; ++i) CHECK(lm.id_at(i, 0, 0) == 1);
  for (int i = 3; i < 6; ++i) CHECK(lm.id_at(i, 0, 0) == 2);
}

TEST_CASE("kmeans rejects constant images") {
  const Volume img = Volume::full({4, 4, 4}, Affine::identity(), 7.0);
  const Volume mask = Volume::full({4, 4, 4}, Affine::identity(), 1.0);
  CHECK_THROWS_AS(kmeans_segment(img, mask, 2, 1), DegenerateClusterError);
}

TEST_CASE("kmeans recovers three well-separated blobs with full purity") {
  Rng rng(9);
  Volume img({12, 12, 12}, Affine::identity());
  Volume mask = Volume::zeros({12, 12, 12}, Affine::identity());
  std::vector<int> truth(img.size(), -1);
  const double means[3] = {20.0, 100.0, 200.0};
  for (std::size_t f = 0; f < img.size(); ++f) {
    const int cls = static_cast<int>(rng.uniform_int(0, 2));
    img.data[f] = means[cls] + rng.normal() * 2.0;
    mask.data[f] = 1.0;
    truth[f] = cls;
  }
  const LabelMap lm = kmeans_segment(img, mask, 3, 4);
  for (std::size_t f = 0; f < img.size(); ++f) {
    CHECK(lm.id_at(f) == truth[f] + 1);
  }
}

TEST_CASE("kmeans WCSS never increases across iterations") {
  Rng rng(12);
  std::vector<double> values;
  for (int i = 0; i < 500; ++i) values.push_back(rng.uniform(0, 255));
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    Rng r(seed);
    std::vector<double> trace;
    detail::kmeans_lloyd(values, 5, r, nullptr, &trace);
    for (std::size_t t = 1; t < trace.size(); ++t) {
      CHECK(trace[t] <= trace[t - 1] + 1e-9);
    }
  }
}

TEST_CASE("merge precedence: structure ids overwrite tissue ids") {
  LabelMap autos;
  autos.vol = Volume::full({3, 3, 3}, Affine::identity(), 2.0);
  autos.labels = {{2, "tissue-2"}};
  LabelMap hypo;
  hypo.vol = Volume::zeros({3, 3, 3}, Affine::identity());
  hypo.vol.at(1, 1, 1) = 101.0;
  hypo.labels = {{101, "left-anterior-superior"}};

  const LabelMap merged = merge_labels(autos, hypo);
  CHECK(merged.id_at(1, 1, 1) == 101);
  CHECK(merged.id_at(0, 0, 0) == 2);

  // Empty hypo leaves auto untouched; empty auto passes hypo through.
  LabelMap empty;
  empty.vol = Volume::zeros({3, 3, 3}, Affine::identity());
  CHECK(merge_labels(autos, empty).vol.data == autos.vol.data);
  CHECK(merge_labels(empty, hypo).vol.data == hypo.vol.data);

  LabelMap other;
  other.vol = Volume::zeros({2, 2, 2}, Affine::identity());
  CHECK_THROWS_AS(merge_labels(autos, other), GeometryError);
}

namespace {

// Half-ellipsoid hemisphere flush against the plane i = cut (occupying
// i <= cut), with one structure id inside.
LabelMap half_ellipsoid(int cut, Dims3 dims = {24, 20, 20}) {
  LabelMap lm;
  lm.vol = Volume::zeros(dims, Affine::identity());
  const double cy = dims[1] / 2.0, cz = dims[2] / 2.0;
  for (int k = 0; k < dims[2]; ++k) {
    for (int j = 0; j < dims[1]; ++j) {
      for (int i = 0; i <= cut; ++i) {
        const double dx = (i - cut) / 9.0, dy = (j - cy) / 7.0, dz = (k - cz) / 7.0;
        if (dx * dx + dy * dy + dz * dz <= 1.0) lm.vol.at(i, j, k) = 1.0;
      }
    }
  }
  lm.vol.at(cut, static_cast<int>(cy), static_cast<int>(cz)) = 101.0;
  lm.labels = {{1, "tissue-1"}, {101, "left-anterior-superior"}};
  return lm;
}

long mirror_objective_brute(const LabelMap& lm, int axis, int off) {
  // Independent re-computation: reflect the full foreground voxel set and
  // count exact overlaps plus per-line hull gaps.
  const Dims3 d = lm.vol.dims;
  long total = 0;
  for (int b2 = 0; b2 < d[(axis + 2) % 3]; ++b2) {
    for (int b1 = 0; b1 < d[(axis + 1) % 3]; ++b1) {
      std::vector<int> fg;
      for (int a = 0; a < d[axis]; ++a) {
        int idx[3];
        idx[axis] = a;
        idx[(axis + 1) % 3] = b1;
        idx[(axis + 2) % 3] = b2;
        if (lm.vol.at(idx[0], idx[1], idx[2]) != 0.0) fg.push_back(a);
      }
      if (fg.empty()) continue;
      std::set<int> fgset(fg.begin(), fg.end());
      for (int a : fg) {
        if (fgset.count(off - a)) ++total;
      }
      const int f_lo = fg.front(), f_hi = fg.back();
      const int g_lo = off - f_hi, g_hi = off - f_lo;
      if (g_lo > f_hi) total += g_lo - f_hi - 1;
      if (f_lo > g_hi) total += f_lo - g_hi - 1;
    }
  }
  return total;
}

}  // namespace

TEST_CASE("mirroring a flush hemisphere is seamless") {
  const LabelMap hemi = half_ellipsoid(11);
  const MirrorResult res = mirror_hemisphere(hemi, 4);
  CHECK(res.objective == 0);
  CHECK(res.axis == 0);

  // Output foreground within [N, 2N].
  std::size_t n_in = 0, n_out = 0;
  for (double v : hemi.vol.data) n_in += v != 0.0;
  for (double v : res.map.vol.data) n_out += v != 0.0;
  CHECK(n_out >= n_in);
  CHECK(n_out <= 2 * n_in);

  // The structure voxel got a contralateral twin.
  bool has_right = false;
  for (std::size_t f = 0; f < res.map.vol.size(); ++f) {
    has_right |= res.map.id_at(f) == label_ids::kRightAnteriorSuperior;
  }
  CHECK(has_right);
}

TEST_CASE("mirror search recovers a shifted cut plane as the brute-force argmin") {
  for (int cut : {9, 11, 13}) {
    const LabelMap hemi = half_ellipsoid(cut);
    const MirrorResult res = mirror_hemisphere(hemi, 5);
    // Exhaustive sweep over a wide window with the independent objective.
    long best = std::numeric_limits<long>::max();
    int best_off = 0;
    for (int off = 2 * cut - 8; off <= 2 * cut + 8; ++off) {
      const long obj = mirror_objective_brute(hemi, 0, off);
      if (obj < best) {
        best = obj;
        best_off = off;
      }
    }
    CHECK(res.offset == best_off);
    CHECK(res.objective == best);
    CHECK(res.offset == 2 * cut + 1);  // flush face reflects about the cut boundary
  }
}

TEST_CASE("mirror rejects empty foreground") {
  LabelMap empty;
  empty.vol = Volume::zeros({8, 8, 8}, Affine::identity());
  CHECK_THROWS_AS(mirror_hemisphere(empty, 3), MaskError);
}

TEST_CASE("reference image: zero stddev gives class means, same seed repeats") {
  LabelMap lm;
  lm.vol = Volume::zeros({4, 4, 4}, Affine::identity());
  lm.vol.at(0, 0, 0) = 1.0;
  lm.vol.at(1, 0, 0) = 2.0;
  lm.labels = {{1, "a"}, {2, "b"}};
  IntensityTable table;
  table.stats = {{0, {30.0, 0.0}}, {1, {110.0, 0.0}}, {2, {150.0, 0.0}}};
  const Volume g = synth_reference_image(lm, table, 3);
  CHECK(g.at(0, 0, 0) == 110.0);
  CHECK(g.at(1, 0, 0) == 150.0);
  CHECK(g.at(2, 2, 2) == 30.0);

  table.stats[1].second = 5.0;
  const Volume g1 = synth_reference_image(lm, table, 42);
  const Volume g2 = synth_reference_image(lm, table, 42);
  CHECK(g1.data == g2.data);

  LabelMap unmapped = lm;
  unmapped.vol.at(3, 3, 3) = 9.0;
  unmapped.labels[9] = "nine";
  CHECK_THROWS_AS(synth_reference_image(unmapped, table, 1), LabelError);
}

TEST_CASE("reference image sample mean obeys the CLT bound") {
  LabelMap lm;
  lm.vol = Volume::zeros({20, 20, 20}, Affine::identity());
  lm.labels = {};
  IntensityTable table;
  table.stats = {{0, {100.0, 5.0}}};
  const Volume g = synth_reference_image(lm, table, 7);
  double acc = 0.0;
  for (double v : g.data) acc += v;
  const double mean = acc / static_cast<double>(g.size());
  const double bound = 3.0 * 5.0 / std::sqrt(static_cast<double>(g.size()));
  CHECK(std::abs(mean - 100.0) < bound);
}

TEST_CASE("attach_coords normalization and clamping") {
  // Grid with world origin at voxel 0 and 1mm spacing.
  const Dims3 dims = {5, 5, 5};
  const Affine grid = Affine::identity();

  // MNI point at the origin -> (0,0,0) channels.
  const CoordVolume c0 = attach_coords(dims, grid, Affine::identity());
  CHECK(c0.at(0, 0, 0, 0) == 0.0);
  CHECK(c0.at(1, 0, 0, 0) == 0.0);
  CHECK(c0.at(2, 0, 0, 0) == 0.0);

  // MNI point (100,0,0) -> channel values (1,0,0).
  Affine shift = Affine::identity();
  shift.set_translation({100.0, 0.0, 0.0});
  const CoordVolume c1 = attach_coords(dims, grid, shift);
  CHECK(c1.at(0, 0, 0, 0) == 1.0);
  CHECK(c1.at(1, 0, 0, 0) == 0.0);

  // Identity MNI affine: channels equal world coordinates / 100 (exact).
  const Affine grid2 = Affine::scaling({2, 2, 2}, {-4, 0, 6});
  const CoordVolume c2 = attach_coords(dims, grid2, Affine::identity());
  for (int k = 0; k < 5; ++k) {
    const Vec3 w = grid2.apply({3.0, 1.0, static_cast<double>(k)});
    CHECK(std::abs(c2.at(2, 3, 1, k) - w[2] / 100.0) < 1e-12);
  }

  // Far-away grid clamps to [-1, 1].
  Affine far = Affine::identity();
  far.set_translation({5000.0, 0.0, 0.0});
  const CoordVolume c3 = attach_coords(dims, far, Affine::identity());
  CHECK(c3.at(0, 4, 4, 4) == 1.0);

  Affine singular;
  singular.at(0, 0) = 0.0;
  CHECK_THROWS_AS(attach_coords(dims, grid, singular), GeometryError);
}

TEST_CASE("crop_training_pair centers on the structure centroid") {
  LabelMap lm;
  lm.vol = Volume::zeros({40, 40, 40}, Affine::scaling({0.5, 0.5, 0.5}));
  for (int k = 18; k <= 22; ++k) {
    for (int j = 17; j <= 21; ++j) {
      for (int i = 10; i <= 14; ++i) lm.vol.at(i, j, k) = 101.0;
    }
  }
  lm.labels = {{101, "left-anterior-superior"}};
  const CoordVolume coords = attach_coords(lm.vol, Affine::identity());

  const auto [l_crop, c_crop] = crop_training_pair(lm, coords, {101}, {16, 16, 16});
  CHECK(l_crop.vol.dims == Dims3{16, 16, 16});
  CHECK(c_crop.dims == Dims3{16, 16, 16});
  // Centroid (12,19,20) lands on the crop center (16/2 = 8).
  CHECK(l_crop.id_at(8, 8, 8) == 101);

  // Coordinates preserved: world position of a retained voxel is unchanged.
  const Vec3 w_full = lm.vol.index_to_world({12, 19, 20});
  const Vec3 w_crop = l_crop.vol.index_to_world({8, 8, 8});
  for (int a = 0; a < 3; ++a) CHECK(std::abs(w_full[a] - w_crop[a]) < 1e-12);

  CHECK_THROWS_AS(crop_training_pair(lm, coords, {105}, {16, 16, 16}), MaskError);
}

TEST_SUITE_END();
