#include "hsx/volume.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hsx {

std::vector<int> LabelMap::distinct_ids() const {
  std::set<int> ids;
  for (double v : vol.data) {
    const int id = static_cast<int>(std::llround(v));
    if (id != 0) ids.insert(id);
  }
  return {ids.begin(), ids.end()};
}

void LabelMap::validate() const {
  for (std::size_t f = 0; f < vol.data.size(); ++f) {
    const double v = vol.data[f];
    if (v < 0.0 || v != std::floor(v)) {
      throw LabelError("label map holds a non-integer or negative value");
    }
    const int id = static_cast<int>(v);
    if (id != 0 && labels.find(id) == labels.end()) {
      throw LabelError("label id " + std::to_string(id) + " missing from dictionary");
    }
  }
}

Volume LabelMap::mask_of(const std::vector<int>& ids) const {
  Volume out = Volume::zeros(vol.dims, vol.affine);
  const std::set<int> want(ids.begin(), ids.end());
  for (std::size_t f = 0; f < vol.data.size(); ++f) {
    if (want.count(static_cast<int>(std::llround(vol.data[f])))) out.data[f] = 1.0;
  }
  return out;
}

}  // namespace hsx
