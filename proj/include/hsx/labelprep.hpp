#pragma once

#include <map>
#include <utility>
#include <vector>

#include "hsx/rng.hpp"
#include "hsx/volume.hpp"

namespace hsx {

// Inputs for one hemisphere: skull-stripped bias-corrected intensity at the
// working resolution, its brain mask, and the manual structure labels.
struct HemisphereInput {
  Volume intensity;
  Volume brain_mask;
  LabelMap hypo_labels;
};

// Per-class intensity statistics used to synthesize the registration
// surrogate image.
struct IntensityTable {
  std::map<int, std::pair<double, double>> stats;  // id -> (mean, stddev)
};

// Normalized positional channels are an ordinary 3-channel volume.
using CoordVolume = MultiChannelVolume;

// Lloyd's algorithm with k-means++ seeding on the masked intensities.
// Labels 1..k are assigned in ascending order of the final center value;
// background stays 0. Fewer distinct foreground intensities than k ->
// DegenerateClusterError.
LabelMap kmeans_segment(const Volume& intensity, const Volume& mask, int k,
                        uint64_t seed);

// Manual structure ids overwrite the automated tissue ids wherever nonzero.
LabelMap merge_labels(const LabelMap& auto_lm, const LabelMap& hypo_lm);

// Reflects a one-hemisphere map across a mid-sagittal plane chosen by
// integer search over the reflection offset, minimizing overlap plus
// interface-gap voxel counts. The reflected copy's structure ids are
// remapped to their contralateral partners; original voxels win on overlap.
struct MirrorResult {
  LabelMap map;
  int axis = 0;        // voxel axis identified as sagittal
  int offset = 0;      // chosen reflection: i' = offset - i
  long objective = 0;  // overlap + gap count at the chosen offset
};
MirrorResult mirror_hemisphere(const LabelMap& lm, int search_halfwidth_vox);

// Per-voxel draw from N(mean, stddev^2) of the voxel's class.
Volume synth_reference_image(const LabelMap& lm, const IntensityTable& table,
                             uint64_t seed);

// Channel c at voxel v: ((mni_affine * voxel-to-world)(v))_c / 100, clamped
// to [-1, 1].
CoordVolume attach_coords(const Dims3& dims, const Affine& grid_affine,
                          const Affine& mni_affine);
CoordVolume attach_coords(const Volume& grid, const Affine& mni_affine);

// Crops both arrays to the model grid about the rounded centroid of the
// structure foreground.
std::pair<LabelMap, CoordVolume> crop_training_pair(const LabelMap& full,
                                                    const CoordVolume& coords,
                                                    const std::vector<int>& hypo_ids,
                                                    const Dims3& model_dims);

namespace detail {

// Core 1D Lloyd iteration, exposed for the monotonicity property test.
// Returns final centers (sorted ascending) and per-iteration within-cluster
// sum of squares when `wcss_trace` is given.
std::vector<double> kmeans_lloyd(const std::vector<double>& values, int k, Rng& rng,
                                 std::vector<int>* assignment,
                                 std::vector<double>* wcss_trace);

}  // namespace detail

}  // namespace hsx
