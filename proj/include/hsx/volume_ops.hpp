#pragma once

#include <vector>

#include "hsx/volume.hpp"

namespace hsx {

enum class Interp { nearest, trilinear };

// Samples `vol` at the world points of the target grid. Out-of-bounds points
// take value 0 (zero-padded trilinear corners at the edge).
Volume resample(const Volume& vol, Dims3 target_dims, const Affine& target_affine,
                Interp interp);

// Label payloads must use nearest interpolation; trilinear throws
// LabelInterpError.
LabelMap resample(const LabelMap& lm, Dims3 target_dims, const Affine& target_affine,
                  Interp interp);

MultiChannelVolume resample(const MultiChannelVolume& mc, Dims3 target_dims,
                            const Affine& target_affine, Interp interp);

// Crops `size` voxels centered on `center_index`; out-of-range regions are
// zero-padded. The output affine preserves world coordinates of retained
// voxels.
Volume crop(const Volume& vol, Dims3 center_index, Dims3 size);
LabelMap crop(const LabelMap& lm, Dims3 center_index, Dims3 size);
MultiChannelVolume crop(const MultiChannelVolume& mc, Dims3 center_index, Dims3 size);

// One-hot encodes over |label_set|+1 channels; channel 0 is background and
// channel 1+i corresponds to label_set[i]. Ids outside label_set u {0} throw
// LabelError.
MultiChannelVolume one_hot(const LabelMap& lm, const std::vector<int>& label_set);

// Per-voxel argmax over channels mapped back through label_set (inverse of
// one_hot).
LabelMap argmax_labels(const MultiChannelVolume& mc, const std::vector<int>& label_set);

// Min-max rescale to [0,1]; a constant volume maps to all zeros.
Volume minmax_rescale(const Volume& vol);

}  // namespace hsx
