#include "doctest.h"
#include "helpers.hpp"
#include "hsx/distance.hpp"
#include "oracles.hpp"

using namespace hsx;

TEST_SUITE_BEGIN("distance");

TEST_CASE("1D fixture pre-clip distances are [2,1,0,1,2] mm") {
  Volume mask({5, 1, 1}, Affine::identity());
  mask.data = {0, 0, 1, 0, 0};
  const double clip = 10.0;
  const Volume d = distance_map(mask, clip);
  const std::vector<double> expect = {2, 1, 0, 1, 2};
  for (int i = 0; i < 5; ++i) {
    CHECK(d.data[i] * clip == doctest::Approx(expect[i]).epsilon(1e-12));
  }
}

TEST_CASE("all-zero and all-one masks map to all ones") {
  for (double fill : {0.0, 1.0}) {
    const Volume mask = Volume::full({4, 4, 4}, Affine::identity(), fill);
    const Volume d = distance_map(mask, 5.0);
    for (double v : d.data) CHECK(v == 1.0);
  }
}

TEST_CASE("non-binary input raises MaskError") {
  Volume mask({2, 2, 2}, Affine::identity());
  mask.at(0, 0, 0) = 0.5;
  CHECK_THROWS_AS(distance_map(mask, 10.0), MaskError);
}

TEST_CASE("matches brute force on random grids with anisotropic spacing") {
  for (uint64_t seed = 0; seed < 8; ++seed) {
    const Vec3 spacing = seed % 2 ? Vec3{0.7, 1.3, 2.1} : Vec3{1, 1, 1};
    const Volume mask = hsx::testing::random_mask({12, 12, 12}, 100 + seed, 0.3, spacing);
    const double clip = 10.0 * std::min({spacing[0], spacing[1], spacing[2]});
    const Volume got = distance_map(mask, clip);
    const auto want = hsx::testing::brute_force_boundary_distance(mask, clip);
    for (std::size_t f = 0; f < want.size(); ++f) {
      CHECK(std::abs(got.data[f] * clip - want[f]) < 1e-9);
    }
  }
}

TEST_CASE("boundary voxels map exactly to zero") {
  const Volume mask = hsx::testing::random_mask({10, 10, 10}, 9, 0.4);
  const Volume d = distance_map(mask, 10.0);
  const int nx = 10, ny = 10, nz = 10;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        if (mask.at(i, j, k) != 1.0) continue;
        const bool edge = (i > 0 && mask.at(i - 1, j, k) == 0.0) ||
                          (i + 1 < nx && mask.at(i + 1, j, k) == 0.0) ||
                          (j > 0 && mask.at(i, j - 1, k) == 0.0) ||
                          (j + 1 < ny && mask.at(i, j + 1, k) == 0.0) ||
                          (k > 0 && mask.at(i, j, k - 1) == 0.0) ||
                          (k + 1 < nz && mask.at(i, j, k + 1) == 0.0);
        if (edge) CHECK(d.at(i, j, k) == 0.0);
      }
    }
  }
}

TEST_CASE("clip saturates distant voxels at 1") {
  Volume mask({50, 1, 1}, Affine::identity());
  std::fill(mask.data.begin(), mask.data.end(), 0.0);
  mask.data[0] = 1.0;
  const Volume d = distance_map(mask, 3.0);
  CHECK(d.data[49] == 1.0);
  CHECK(d.data[1] == doctest::Approx(1.0 / 3.0));
}

TEST_SUITE_END();
