#pragma once

#include <map>
#include <vector>

#include "hsx/rng.hpp"
#include "hsx/volume.hpp"
#include "hsx/volume_ops.hpp"

namespace hsx {

struct GmmRange {
  double mu_lo = 0.0;
  double mu_hi = 255.0;
  double sig_lo = 0.0;
  double sig_hi = 35.0;
};

struct GmmParams {
  std::map<int, std::pair<double, double>> by_id;  // id -> (mu, sigma)
};

struct AugmentConfig {
  double rot_deg_max = 20.0;
  double trans_mm_max = 10.0;
  double crop_shift_vox_max = 5.0;
  double elastic_noise_mm = 4.0;
  double elastic_smooth_vox = 8.0;
  double elastic_cap_mm = 6.0;
};

struct BiasConfig {
  bool enabled = true;
  double amp_lo = -0.3;
  double amp_hi = 0.3;
  double smooth_vox = 40.0;
};

struct ResolutionConfig {
  bool enabled = true;
  double min_mm = 0.0;  // clamped up to the model spacing per axis
  double max_mm = 9.0;
};

struct SynthConfig {
  GmmRange gmm;
  AugmentConfig aug;
  BiasConfig bias;
  ResolutionConfig res;
};

// Geometric augmentation: a rigid part (rotation about the grid's world
// center, translation, sub-voxel crop shift) plus a dense elastic
// displacement field in mm whose magnitude respects the configured cap.
struct TransformField {
  Vec3 rot_deg{0, 0, 0};
  Vec3 trans_mm{0, 0, 0};
  Vec3 crop_shift_vox{0, 0, 0};
  MultiChannelVolume elastic_mm;  // 3 channels; may be empty when disabled
  bool has_elastic = false;

  bool is_identity() const;
};

GmmParams sample_gmm_params(const std::vector<int>& ids, Rng& rng, const GmmRange& cfg);

TransformField random_geometric_transform(Rng& rng, const AugmentConfig& cfg,
                                          const Dims3& dims, const Affine& affine);

// Backward warping: output voxel v samples the payload at v plus the field's
// total displacement. Labels use nearest neighbour; requesting trilinear for
// a label payload throws LabelInterpError.
LabelMap apply_transform(const LabelMap& payload, const TransformField& field);
LabelMap apply_transform(const LabelMap& payload, const TransformField& field,
                         Interp interp);
MultiChannelVolume apply_transform(const MultiChannelVolume& payload,
                                   const TransformField& field, Interp interp);
Volume apply_transform(const Volume& payload, const TransformField& field,
                       Interp interp);

// Per-voxel N(mu_id, sigma_id^2) draw, optional smooth multiplicative bias
// field, then min-max rescale to [0,1].
Volume synthesize_intensities(const LabelMap& labels, const GmmParams& params, Rng& rng,
                              const BiasConfig& bias = {});

// Thick-slice acquisition simulation: anisotropic blur to the randomly drawn
// target spacing, subsample, trilinearly resample back to the model grid.
Volume simulate_resolution(const Volume& image, Rng& rng, const ResolutionConfig& cfg);

// One training example on the model grid.
struct SynthSample {
  MultiChannelVolume input;  // synthetic image + 3 transformed coordinate channels
  LabelMap target;           // structure ids only (tissue classes collapse to 0)
  Volume distmap;            // normalized boundary distance of the subregion mask
};

// Two-stream form: the target depends only on geo_rng, never on intensity_rng.
SynthSample make_training_sample(const LabelMap& l_crop, const MultiChannelVolume& c_crop,
                                 const SynthConfig& cfg, Rng& geo_rng, Rng& intensity_rng);
SynthSample make_training_sample(const LabelMap& l_crop, const MultiChannelVolume& c_crop,
                                 const SynthConfig& cfg, const Rng& rng);

namespace detail {

// Raw GMM rendering before bias and rescale; exposed for moment tests.
Volume synthesize_raw(const LabelMap& labels, const GmmParams& params, Rng& rng);

// Separable Gaussian blur with per-axis sigma in voxels; border weights are
// renormalized.
Volume gaussian_blur(const Volume& v, const Vec3& sigma_vox);

}  // namespace detail

}  // namespace hsx
