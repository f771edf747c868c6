#include "doctest.h"
#include "helpers.hpp"
#include "hsx/volume.hpp"

using namespace hsx;

TEST_SUITE_BEGIN("volume");

TEST_CASE("affine invariants") {
  Affine a = Affine::scaling({0.3, 0.3, 0.3}, {1, 2, 3});
  CHECK(a.invertible());
  const Vec3 sp = a.spacing();
  CHECK(sp[0] == doctest::Approx(0.3));

  const Affine inv = a.inverse();
  const Vec3 p = {4.5, -2.0, 7.0};
  const Vec3 round_trip = inv.apply(a.apply(p));
  for (int c = 0; c < 3; ++c) CHECK(round_trip[c] == doctest::Approx(p[c]).epsilon(1e-12));

  Affine singular;
  singular.at(0, 0) = 0.0;
  CHECK_THROWS_AS(singular.inverse(), GeometryError);
}

TEST_CASE("rotation preserves norms") {
  const Affine r = rotation_deg({10, -20, 35});
  const Vec3 v = {1.0, 2.0, -0.5};
  CHECK(norm(r.apply_vector(v)) == doctest::Approx(norm(v)).epsilon(1e-12));
  CHECK(r.det3() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("volume indexing is i-fastest") {
  Volume v({2, 3, 4}, Affine::identity());
  CHECK(v.size() == 24);
  v.at(1, 0, 0) = 5.0;
  CHECK(v.data[1] == 5.0);
  v.at(0, 1, 0) = 7.0;
  CHECK(v.data[2] == 7.0);
  v.at(0, 0, 1) = 9.0;
  CHECK(v.data[6] == 9.0);
}

TEST_CASE("labelmap validate catches missing dictionary entries") {
  LabelMap lm;
  lm.vol = Volume::zeros({2, 2, 2}, Affine::identity());
  lm.vol.at(0, 0, 0) = 3.0;
  CHECK_THROWS_AS(lm.validate(), LabelError);
  lm.labels[3] = "three";
  CHECK_NOTHROW(lm.validate());
  lm.vol.at(1, 0, 0) = 2.5;
  CHECK_THROWS_AS(lm.validate(), LabelError);
}

TEST_CASE("multichannel layout and channel round trip") {
  MultiChannelVolume mc(3, {2, 2, 2}, Affine::identity());
  mc.at(2, 1, 1, 1) = 4.0;
  Volume ch = mc.channel(2);
  CHECK(ch.at(1, 1, 1) == 4.0);
  ch.at(0, 0, 0) = -1.0;
  mc.set_channel(2, ch);
  CHECK(mc.at(2, 0, 0, 0) == -1.0);
}

TEST_CASE("rng determinism and moments") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng r(7);
  double acc = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) acc += r.normal();
  CHECK(std::abs(acc / n) < 3.0 / std::sqrt(static_cast<double>(n)));

  Rng base(9);
  Rng d1 = base.derive(1), d1b = base.derive(1), d2 = base.derive(2);
  CHECK(d1.next_u64() == d1b.next_u64());
  CHECK(d1.next_u64() != d2.next_u64());
}

TEST_CASE("rng uniform_int respects bounds") {
  Rng r(3);
  for (int i = 0; i < 1000; ++i) {
    const int64_t v = r.uniform_int(4, 9);
    CHECK(v >= 4);
    CHECK(v <= 9);
  }
}

TEST_SUITE_END();
