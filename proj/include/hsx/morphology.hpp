#pragma once

#include "hsx/volume.hpp"

namespace hsx {

// Morphological closing with a discrete Euclidean ball of radius_vox voxels:
// dilation then erosion, computed on a radius-padded grid so the result
// matches closing on an unbounded background (extensive: m is a subset of
// close(m)).
Volume morph_close(const Volume& mask, int radius_vox);

Volume morph_dilate(const Volume& mask, int radius_vox);
Volume morph_erode(const Volume& mask, int radius_vox);

}  // namespace hsx
