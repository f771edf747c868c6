#include "doctest.h"
#include "helpers.hpp"
#include "hsx/metrics.hpp"
#include "oracles.hpp"

using namespace hsx;

TEST_SUITE_BEGIN("metrics");

TEST_CASE("dice conventions and hand values") {
  Volume a = Volume::zeros({4, 4, 4}, Affine::identity());
  Volume b = a;
  CHECK(dice(a, b) == 1.0);  // both empty

  a.at(0, 0, 0) = 1.0;
  CHECK(dice(a, b) == 0.0);  // one empty

  // Two 2x2x2 cubes, |A|=|B|=8, overlapping in 4 voxels -> 0.5.
  Volume c1 = Volume::zeros({4, 4, 4}, Affine::identity());
  Volume c2 = c1;
  for (int k = 0; k < 2; ++k) {
    for (int j = 0; j < 2; ++j) {
      for (int i = 0; i < 2; ++i) {
        c1.at(i, j, k) = 1.0;
        c2.at(i + 1, j, k) = 1.0;  // shifted by one voxel along x
      }
    }
  }
  CHECK(dice(c1, c2) == 0.5);

  // Disjoint.
  Volume d1 = Volume::zeros({4, 4, 4}, Affine::identity());
  Volume d2 = d1;
  d1.at(0, 0, 0) = 1.0;
  d2.at(3, 3, 3) = 1.0;
  CHECK(dice(d1, d2) == 0.0);
}

TEST_CASE("dice rejects mismatched grids") {
  const Volume a = Volume::zeros({2, 2, 2}, Affine::identity());
  const Volume b = Volume::zeros({2, 2, 2}, Affine::scaling({2, 2, 2}));
  CHECK_THROWS_AS(dice(a, b), GeometryError);
}

TEST_CASE("avd single-pair and identity") {
  Volume a = Volume::zeros({3, 3, 3}, Affine::identity());
  Volume b = a;
  a.at(0, 0, 0) = 1.0;
  b.at(0, 0, 1) = 1.0;
  CHECK(avd(a, b) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(avd(a, a) == 0.0);
}

TEST_CASE("avd empty set raises EmptySetError") {
  Volume a = Volume::zeros({2, 2, 2}, Affine::identity());
  Volume b = a;
  b.at(0, 0, 0) = 1.0;
  CHECK_THROWS_AS(avd(a, b), EmptySetError);
}

TEST_CASE("avd matches brute force on random pairs") {
  for (uint64_t seed = 0; seed < 6; ++seed) {
    const Vec3 sp = seed % 2 ? Vec3{0.9, 1.1, 1.4} : Vec3{1, 1, 1};
    Volume a = hsx::testing::random_mask({12, 12, 12}, 500 + seed, 0.2, sp);
    Volume b = hsx::testing::random_mask({12, 12, 12}, 900 + seed, 0.2, sp);
    bool any_a = false, any_b = false;
    for (double v : a.data) any_a |= v == 1.0;
    for (double v : b.data) any_b |= v == 1.0;
    if (!any_a) a.at(0, 0, 0) = 1.0;
    if (!any_b) b.at(1, 1, 1) = 1.0;
    const double got = avd(a, b);
    const double want = hsx::testing::brute_force_avd(a, b);
    CHECK(std::abs(got - want) < 1e-9);
  }
}

TEST_CASE("avd symmetric under the max formulation") {
  const Volume a = hsx::testing::random_mask({8, 8, 8}, 1, 0.3);
  const Volume b = hsx::testing::random_mask({8, 8, 8}, 2, 0.3);
  CHECK(avd(a, b) == avd(b, a));
}

TEST_CASE("avd variants stay finite and ordered") {
  const Volume a = hsx::testing::random_mask({8, 8, 8}, 5, 0.3);
  const Volume b = hsx::testing::random_mask({8, 8, 8}, 6, 0.3);
  const double full_max = avd(a, b);
  AvdOptions sym;
  sym.mode = AvdMode::symmetric_mean;
  CHECK(avd(a, b, sym) <= full_max + 1e-15);
  AvdOptions surf;
  surf.points = AvdPoints::surface;
  CHECK(avd(a, b, surf) >= 0.0);
}

TEST_CASE("region_volumes uses the voxel cell determinant") {
  LabelMap lm;
  lm.vol = Volume::zeros({5, 5, 5}, Affine::scaling({0.85, 0.85, 5.0}));
  for (int i = 0; i < 10; ++i) lm.vol.data[i] = 7.0;
  lm.labels = {{7, "seven"}, {8, "eight"}};
  const auto vols = region_volumes(lm);
  CHECK(vols.at(7) == doctest::Approx(36.125).epsilon(1e-12));
  CHECK(vols.at(8) == 0.0);

  LabelMap iso;
  iso.vol = Volume::zeros({4, 4, 4}, Affine::identity());
  for (int i = 0; i < 10; ++i) iso.vol.data[i] = 1.0;
  iso.labels = {{1, "one"}};
  CHECK(region_volumes(iso).at(1) == doctest::Approx(10.0));
}

TEST_SUITE_END();
