#pragma once

#include <vector>

#include "hsx/volume.hpp"

namespace hsx {

// Normalized boundary distance map. For each voxel, the exact Euclidean
// distance in mm to the nearest boundary voxel of the mask foreground
// (boundary = foreground voxel with a face-adjacent background neighbor
// inside the grid), clipped at clip_mm and divided by clip_mm. Masks with no
// boundary (all-foreground, all-background) map to all ones.
Volume distance_map(const Volume& mask, double clip_mm);

// Default clip: ten times the smallest voxel spacing.
double default_clip_mm(const Volume& mask);

namespace detail {

// Exact squared Euclidean distance to the nearest seed voxel, separable
// lower-envelope scan per axis. `spacing` scales index deltas to mm (exact
// when the affine columns are orthogonal). Voxels unreachable from any seed
// hold a value >= kNoSeed.
constexpr double kNoSeed = 1e30;
std::vector<double> squared_edt(const std::vector<uint8_t>& seed, const Dims3& dims,
                                const Vec3& spacing);

}  // namespace detail

}  // namespace hsx
