#include "doctest.h"
#include "helpers.hpp"
#include "hsx/morphology.hpp"

using namespace hsx;

TEST_SUITE_BEGIN("morphology");

namespace {

Volume cube_with_hole() {
  Volume m = Volume::zeros({5, 5, 5}, Affine::identity());
  for (int k = 1; k <= 3; ++k) {
    for (int j = 1; j <= 3; ++j) {
      for (int i = 1; i <= 3; ++i) m.at(i, j, k) = 1.0;
    }
  }
  m.at(2, 2, 2) = 0.0;
  return m;
}

}  // namespace

TEST_CASE("closing fills an interior hole") {
  const Volume closed = morph_close(cube_with_hole(), 1);
  CHECK(closed.at(2, 2, 2) == 1.0);
  // The cube itself is preserved.
  for (int k = 1; k <= 3; ++k) {
    for (int j = 1; j <= 3; ++j) {
      for (int i = 1; i <= 3; ++i) CHECK(closed.at(i, j, k) == 1.0);
    }
  }
}

TEST_CASE("closing leaves a solid cube unchanged") {
  Volume m = cube_with_hole();
  m.at(2, 2, 2) = 1.0;
  const Volume closed = morph_close(m, 1);
  CHECK(closed.data == m.data);
}

TEST_CASE("closing is idempotent and extensive on random masks") {
  for (uint64_t seed = 0; seed < 6; ++seed) {
    const Volume m = hsx::testing::random_mask({10, 10, 10}, 40 + seed, 0.25);
    for (int r : {1, 2}) {
      const Volume once = morph_close(m, r);
      const Volume twice = morph_close(once, r);
      CHECK(twice.data == once.data);
      for (std::size_t f = 0; f < m.size(); ++f) {
        if (m.data[f] == 1.0) CHECK(once.data[f] == 1.0);
      }
    }
  }
}

TEST_CASE("mask touching the grid border survives closing") {
  Volume m = Volume::zeros({4, 4, 4}, Affine::identity());
  m.at(0, 0, 0) = 1.0;
  m.at(0, 1, 0) = 1.0;
  const Volume closed = morph_close(m, 1);
  CHECK(closed.at(0, 0, 0) == 1.0);
  CHECK(closed.at(0, 1, 0) == 1.0);
}

TEST_CASE("dilate/erode reject non-binary input") {
  Volume m({2, 2, 2}, Affine::identity());
  m.at(0, 0, 0) = 2.0;
  CHECK_THROWS_AS(morph_close(m, 1), MaskError);
}

TEST_SUITE_END();
