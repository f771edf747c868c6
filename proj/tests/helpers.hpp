#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

#include "hsx/rng.hpp"
#include "hsx/volume.hpp"

namespace hsx::testing {

// Scratch directory under the test working dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("hsx_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Volume random_volume(Dims3 dims, uint64_t seed, double lo = -10.0,
                            double hi = 10.0) {
  Rng rng(seed);
  Volume v(dims, Affine::identity());
  for (double& x : v.data) x = rng.uniform(lo, hi);
  return v;
}

inline Volume random_mask(Dims3 dims, uint64_t seed, double fg_prob = 0.3,
                          Vec3 spacing = {1, 1, 1}) {
  Rng rng(seed);
  Volume v(dims, Affine::scaling(spacing));
  for (double& x : v.data) x = rng.uniform() < fg_prob ? 1.0 : 0.0;
  return v;
}

}  // namespace hsx::testing
