#include "hsx/morphology.hpp"

#include "hsx/distance.hpp"

namespace hsx {

namespace {

// Ball membership threshold in squared voxel units. Squared index distances
// are exact integers in double, so <= r^2 is an exact test.
std::vector<uint8_t> within_ball(const std::vector<double>& d2, double r2) {
  std::vector<uint8_t> out(d2.size());
  for (std::size_t f = 0; f < d2.size(); ++f) out[f] = d2[f] <= r2 ? 1 : 0;
  return out;
}

}  // namespace

Volume morph_dilate(const Volume& mask, int radius_vox) {
  if (!mask.is_binary()) throw MaskError("morphology input must be binary");
  std::vector<uint8_t> seed(mask.size());
  for (std::size_t f = 0; f < mask.size(); ++f) seed[f] = mask.data[f] == 1.0 ? 1 : 0;
  const auto d2 = detail::squared_edt(seed, mask.dims, {1, 1, 1});
  const auto fg = within_ball(d2, static_cast<double>(radius_vox) * radius_vox);
  Volume out(mask.dims, mask.affine);
  for (std::size_t f = 0; f < out.size(); ++f) out.data[f] = fg[f];
  return out;
}

Volume morph_erode(const Volume& mask, int radius_vox) {
  if (!mask.is_binary()) throw MaskError("morphology input must be binary");
  std::vector<uint8_t> seed(mask.size());
  for (std::size_t f = 0; f < mask.size(); ++f) seed[f] = mask.data[f] == 0.0 ? 1 : 0;
  const auto d2 = detail::squared_edt(seed, mask.dims, {1, 1, 1});
  Volume out(mask.dims, mask.affine);
  const double r2 = static_cast<double>(radius_vox) * radius_vox;
  for (std::size_t f = 0; f < out.size(); ++f) out.data[f] = d2[f] > r2 ? 1.0 : 0.0;
  return out;
}

Volume morph_close(const Volume& mask, int radius_vox) {
  if (!mask.is_binary()) throw MaskError("morphology input must be binary");
  if (radius_vox < 1) return mask;
  const int r = radius_vox;
  const Dims3 d = mask.dims;
  const Dims3 padded = {d[0] + 2 * r, d[1] + 2 * r, d[2] + 2 * r};

  Volume pad(padded, mask.affine);  // affine bookkeeping is restored on crop
  for (int k = 0; k < d[2]; ++k) {
    for (int j = 0; j < d[1]; ++j) {
      for (int i = 0; i < d[0]; ++i) {
        pad.at(i + r, j + r, k + r) = mask.at(i, j, k);
      }
    }
  }
  const Volume closed = morph_erode(morph_dilate(pad, r), r);
  Volume out(d, mask.affine);
  for (int k = 0; k < d[2]; ++k) {
    for (int j = 0; j < d[1]; ++j) {
      for (int i = 0; i < d[0]; ++i) {
        out.at(i, j, k) = closed.at(i + r, j + r, k + r);
      }
    }
  }
  return out;
}

}  // namespace hsx
