#include "doctest.h"
#include "helpers.hpp"
#include "hsx/volume_ops.hpp"

using namespace hsx;

TEST_SUITE_BEGIN("volume_ops");

TEST_CASE("resample onto own grid is the identity for both interpolators") {
  const Volume v = hsx::testing::random_volume({5, 6, 7}, 11);
  for (Interp interp : {Interp::nearest, Interp::trilinear}) {
    const Volume r = resample(v, v.dims, v.affine, interp);
    CHECK(r.data == v.data);
  }
}

TEST_CASE("trilinear ramp at half-voxel offsets") {
  // 1D ramp [0,1,2]; sample at x = 0.5 and 1.5 via a shifted target affine.
  Volume ramp({3, 1, 1}, Affine::identity());
  ramp.data = {0.0, 1.0, 2.0};
  Affine target = Affine::identity();
  target.set_translation({0.5, 0.0, 0.0});
  const Volume out = resample(ramp, {2, 1, 1}, target, Interp::trilinear);
  CHECK(out.data[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(out.data[1] == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("out-of-bounds samples are zero") {
  Volume v({2, 2, 2}, Affine::identity());
  std::fill(v.data.begin(), v.data.end(), 3.0);
  Affine far = Affine::identity();
  far.set_translation({10.0, 10.0, 10.0});
  const Volume out = resample(v, {2, 2, 2}, far, Interp::trilinear);
  for (double x : out.data) CHECK(x == 0.0);
}

TEST_CASE("label resample forces nearest") {
  LabelMap lm;
  lm.vol = Volume::zeros({3, 3, 3}, Affine::identity());
  lm.vol.at(1, 1, 1) = 4.0;
  lm.labels[4] = "four";
  CHECK_THROWS_AS(resample(lm, lm.vol.dims, lm.vol.affine, Interp::trilinear),
                  LabelInterpError);
  const LabelMap ok = resample(lm, lm.vol.dims, lm.vol.affine, Interp::nearest);
  CHECK(ok.vol.data == lm.vol.data);
}

TEST_CASE("singular target affine raises GeometryError") {
  const Volume v = hsx::testing::random_volume({3, 3, 3}, 2);
  Affine bad;
  bad.at(1, 1) = 0.0;
  CHECK_THROWS_AS(resample(v, v.dims, bad, Interp::nearest), GeometryError);
}

TEST_CASE("crop preserves world coordinates of surviving voxels") {
  Volume v({20, 20, 20}, Affine::scaling({0.3, 0.4, 0.5}, {-3, 2, 1}));
  const Dims3 center = {10, 9, 8};
  const Dims3 size = {6, 6, 6};
  const Volume c = crop(v, center, size);
  CHECK(c.dims == size);
  // Voxel (0,0,0) of the crop is voxel (center - size/2) of the input.
  const Vec3 w_in = v.index_to_world({7.0, 6.0, 5.0});
  const Vec3 w_out = c.index_to_world({0.0, 0.0, 0.0});
  for (int a = 0; a < 3; ++a) CHECK(std::abs(w_in[a] - w_out[a]) < 1e-12);

  // A marked voxel keeps its world position.
  Volume v2 = v;
  v2.at(10, 9, 8) = 77.0;
  const Volume c2 = crop(v2, center, size);
  CHECK(c2.at(3, 3, 3) == 77.0);
}

TEST_CASE("crop equal to full extent is identity") {
  const Volume v = hsx::testing::random_volume({4, 6, 8}, 3);
  const Volume c = crop(v, {2, 3, 4}, v.dims);
  CHECK(c.data == v.data);
  CHECK(c.affine.almost_equal(v.affine, 1e-12));
}

TEST_CASE("crop zero-pads out-of-range regions") {
  Volume v({2, 2, 2}, Affine::identity());
  std::fill(v.data.begin(), v.data.end(), 1.0);
  const Volume c = crop(v, {0, 0, 0}, {4, 4, 4});
  double sum = 0.0;
  for (double x : c.data) sum += x;
  CHECK(sum == 8.0);  // all original voxels survive, rest is zero
}

TEST_CASE("one_hot basics and reconstruction oracle") {
  LabelMap lm;
  lm.vol = Volume::zeros({1, 1, 1}, Affine::identity());
  lm.vol.at(0, 0, 0) = 2.0;
  lm.labels = {{1, "a"}, {2, "b"}};
  const MultiChannelVolume oh = one_hot(lm, {1, 2});
  CHECK(oh.channels == 3);
  CHECK(oh.at(0, 0, 0, 0) == 0.0);
  CHECK(oh.at(1, 0, 0, 0) == 0.0);
  CHECK(oh.at(2, 0, 0, 0) == 1.0);

  // All-background map: channel 0 all ones.
  LabelMap bg;
  bg.vol = Volume::zeros({3, 3, 3}, Affine::identity());
  const MultiChannelVolume ohbg = one_hot(bg, {1, 2});
  for (std::size_t f = 0; f < ohbg.voxels(); ++f) CHECK(ohbg.data[f] == 1.0);

  // Random map over ids 1..12: per-voxel channel sums are exactly 1 and
  // argmax reconstructs the map.
  Rng rng(77);
  LabelMap rnd;
  rnd.vol = Volume::zeros({8, 8, 8}, Affine::identity());
  std::vector<int> ids;
  for (int id = 1; id <= 12; ++id) {
    ids.push_back(id);
    rnd.labels[id] = "l" + std::to_string(id);
  }
  for (double& x : rnd.vol.data) x = static_cast<double>(rng.uniform_int(0, 12));
  const MultiChannelVolume oh2 = one_hot(rnd, ids);
  const std::size_t n = oh2.voxels();
  for (std::size_t f = 0; f < n; ++f) {
    double s = 0.0;
    for (int c = 0; c < oh2.channels; ++c) s += oh2.data[c * n + f];
    CHECK(s == 1.0);
  }
  const LabelMap back = argmax_labels(oh2, ids);
  CHECK(back.vol.data == rnd.vol.data);
}

TEST_CASE("one_hot rejects unknown ids") {
  LabelMap lm;
  lm.vol = Volume::zeros({2, 2, 2}, Affine::identity());
  lm.vol.at(0, 0, 0) = 9.0;
  lm.labels[9] = "nine";
  CHECK_THROWS_AS(one_hot(lm, {1, 2}), LabelError);
}

TEST_CASE("minmax_rescale contract") {
  Volume v({2, 2, 1}, Affine::identity());
  v.data = {2.0, 4.0, 6.0, 10.0};
  const Volume r = minmax_rescale(v);
  CHECK(r.data[0] == 0.0);
  CHECK(r.data[3] == 1.0);
  CHECK(r.data[1] == doctest::Approx(0.25));

  Volume c = Volume::full({2, 2, 1}, Affine::identity(), 5.0);
  const Volume rc = minmax_rescale(c);
  for (double x : rc.data) CHECK(x == 0.0);
}

TEST_SUITE_END();
