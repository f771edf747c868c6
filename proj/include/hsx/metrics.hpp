#pragma once

#include <map>
#include <string>

#include "hsx/volume.hpp"

namespace hsx {

// Dice coefficient 2|A^B|/(|A|+|B|). Conventions: both empty -> 1.0,
// exactly one empty -> 0.0.
double dice(const Volume& a, const Volume& b);

enum class AvdMode { max_directed, symmetric_mean };
enum class AvdPoints { full, surface };

struct AvdOptions {
  AvdMode mode = AvdMode::max_directed;
  AvdPoints points = AvdPoints::full;
};

// Average Hausdorff distance in mm between voxel sets (world coordinates).
// Default is max(dbar(A->B), dbar(B->A)) over all foreground voxels; the
// symmetric-mean and surface-only variants are available for sensitivity
// checks. Both sets must be nonempty.
double avd(const Volume& a, const Volume& b, const AvdOptions& opt = {});

// Volume in mm^3 per label id: voxel count times |det| of the voxel cell.
std::map<int, double> region_volumes(const LabelMap& lm);

struct RegionMetricRow {
  int id = 0;
  std::string name;
  double dice = 0.0;
  double avd_mm = 0.0;
  double volume_mm3 = 0.0;  // predicted volume
};

}  // namespace hsx
