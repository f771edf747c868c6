#include "hsx/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hsx/distance.hpp"
#include "hsx/labels.hpp"

namespace hsx {

bool TransformField::is_identity() const {
  auto zero3 = [](const Vec3& v) { return v[0] == 0.0 && v[1] == 0.0 && v[2] == 0.0; };
  if (!zero3(rot_deg) || !zero3(trans_mm) || !zero3(crop_shift_vox)) return false;
  if (!has_elastic) return true;
  for (double v : elastic_mm.data) {
    if (v != 0.0) return false;
  }
  return true;
}

GmmParams sample_gmm_params(const std::vector<int>& ids, Rng& rng, const GmmRange& cfg) {
  if (cfg.mu_lo > cfg.mu_hi || cfg.sig_lo > cfg.sig_hi) {
    throw ConfigError("gmm range has lo > hi");
  }
  GmmParams out;
  for (int id : ids) {
    const double mu = rng.uniform(cfg.mu_lo, cfg.mu_hi);
    const double sig = rng.uniform(cfg.sig_lo, cfg.sig_hi);
    out.by_id[id] = {mu, sig};
  }
  return out;
}

namespace detail {

Volume gaussian_blur(const Volume& v, const Vec3& sigma_vox) {
  Volume out = v;
  for (int axis = 0; axis < 3; ++axis) {
    const double s = sigma_vox[axis];
    if (s <= 1e-12) continue;
    const int radius = static_cast<int>(std::ceil(3.0 * s));
    std::vector<double> kernel(2 * radius + 1);
    for (int t = -radius; t <= radius; ++t) {
      kernel[t + radius] = std::exp(-0.5 * (t / s) * (t / s));
    }
    const Dims3 d = out.dims;
    Volume next(d, out.affine);
    for (int k = 0; k < d[2]; ++k) {
      for (int j = 0; j < d[1]; ++j) {
        for (int i = 0; i < d[0]; ++i) {
          int idx[3] = {i, j, k};
          double acc = 0.0, wsum = 0.0;
          for (int t = -radius; t <= radius; ++t) {
            int p = idx[axis] + t;
            if (p < 0 || p >= d[axis]) continue;
            int q[3] = {i, j, k};
            q[axis] = p;
            const double w = kernel[t + radius];
            acc += w * out.at(q[0], q[1], q[2]);
            wsum += w;
          }
          next.at(i, j, k) = acc / wsum;
        }
      }
    }
    out = std::move(next);
  }
  return out;
}

Volume synthesize_raw(const LabelMap& labels, const GmmParams& params, Rng& rng) {
  for (int id : labels.distinct_ids()) {
    if (!params.by_id.count(id)) {
      throw LabelError("gmm params miss id " + std::to_string(id));
    }
  }
  if (!params.by_id.count(0)) {
    throw LabelError("gmm params miss the background class 0");
  }
  Volume out(labels.vol.dims, labels.vol.affine);
  for (std::size_t f = 0; f < out.size(); ++f) {
    const auto& [mu, sig] = params.by_id.at(labels.id_at(f));
    out.data[f] = rng.normal(mu, sig);
  }
  return out;
}

}  // namespace detail

TransformField random_geometric_transform(Rng& rng, const AugmentConfig& cfg,
                                          const Dims3& dims, const Affine& affine) {
  if (cfg.rot_deg_max < 0 || cfg.trans_mm_max < 0 || cfg.crop_shift_vox_max < 0 ||
      cfg.elastic_noise_mm < 0 || cfg.elastic_cap_mm < 0) {
    throw ConfigError("augmentation amplitudes must be nonnegative");
  }
  TransformField field;
  for (int a = 0; a < 3; ++a) {
    field.rot_deg[a] = cfg.rot_deg_max > 0 ? rng.uniform(-cfg.rot_deg_max, cfg.rot_deg_max) : 0.0;
  }
  for (int a = 0; a < 3; ++a) {
    field.trans_mm[a] = cfg.trans_mm_max > 0 ? rng.uniform(-cfg.trans_mm_max, cfg.trans_mm_max) : 0.0;
  }
  for (int a = 0; a < 3; ++a) {
    field.crop_shift_vox[a] =
        cfg.crop_shift_vox_max > 0 ? rng.uniform(-cfg.crop_shift_vox_max, cfg.crop_shift_vox_max) : 0.0;
  }
  if (cfg.elastic_noise_mm > 0 && cfg.elastic_cap_mm > 0) {
    field.has_elastic = true;
    field.elastic_mm = MultiChannelVolume(3, dims, affine);
    const Vec3 sigma = {cfg.elastic_smooth_vox, cfg.elastic_smooth_vox,
                        cfg.elastic_smooth_vox};
    for (int c = 0; c < 3; ++c) {
      Volume noise(dims, affine);
      for (double& v : noise.data) v = rng.normal(0.0, cfg.elastic_noise_mm);
      field.elastic_mm.set_channel(c, detail::gaussian_blur(noise, sigma));
    }
    // Scale so the max vector magnitude respects the cap.
    double max_mag2 = 0.0;
    const std::size_t n = field.elastic_mm.voxels();
    for (std::size_t f = 0; f < n; ++f) {
      const double x = field.elastic_mm.data[f];
      const double y = field.elastic_mm.data[n + f];
      const double z = field.elastic_mm.data[2 * n + f];
      max_mag2 = std::max(max_mag2, x * x + y * y + z * z);
    }
    const double max_mag = std::sqrt(max_mag2);
    if (max_mag > cfg.elastic_cap_mm && max_mag > 0) {
      const double scale = cfg.elastic_cap_mm / max_mag;
      for (double& v : field.elastic_mm.data) v *= scale;
    }
  }
  return field;
}

namespace {

// Source index for output voxel v under the backward warp.
struct WarpContext {
  Affine to_world;
  Affine to_index;
  Affine rot;
  Vec3 center_world;
  const TransformField* field;

  WarpContext(const Dims3& dims, const Affine& affine, const TransformField& f)
      : to_world(affine), to_index(affine.inverse()), rot(rotation_deg(f.rot_deg)),
        field(&f) {
    center_world = affine.apply({(dims[0] - 1) / 2.0, (dims[1] - 1) / 2.0,
                                 (dims[2] - 1) / 2.0});
  }

  Vec3 source_index(int i, int j, int k) const {
    const Vec3 v = {static_cast<double>(i), static_cast<double>(j),
                    static_cast<double>(k)};
    Vec3 w = to_world.apply(v);
    w = rot.apply_vector(w - center_world) + center_world + field->trans_mm;
    if (field->has_elastic) {
      const std::size_t n = field->elastic_mm.voxels();
      const std::size_t f = field->elastic_mm.index(0, i, j, k);
      w = w + Vec3{field->elastic_mm.data[f], field->elastic_mm.data[n + f],
                   field->elastic_mm.data[2 * n + f]};
    }
    return to_index.apply(w) + field->crop_shift_vox;
  }
};

}  // namespace

Volume apply_transform(const Volume& payload, const TransformField& field,
                       Interp interp) {
  if (field.is_identity()) return payload;
  const WarpContext ctx(payload.dims, payload.affine, field);
  const Volume& src = payload;
  Volume out(payload.dims, payload.affine);
  std::size_t f = 0;
  for (int k = 0; k < payload.dims[2]; ++k) {
    for (int j = 0; j < payload.dims[1]; ++j) {
      for (int i = 0; i < payload.dims[0]; ++i, ++f) {
        const Vec3 u = ctx.source_index(i, j, k);
        if (interp == Interp::nearest) {
          const int si = static_cast<int>(std::nearbyint(u[0]));
          const int sj = static_cast<int>(std::nearbyint(u[1]));
          const int sk = static_cast<int>(std::nearbyint(u[2]));
          out.data[f] = src.in_bounds(si, sj, sk) ? src.at(si, sj, sk) : 0.0;
        } else {
          // Inline trilinear with zero padding.
          const double x = u[0], y = u[1], z = u[2];
          const int i0 = static_cast<int>(std::floor(x));
          const int j0 = static_cast<int>(std::floor(y));
          const int k0 = static_cast<int>(std::floor(z));
          const double fx = x - i0, fy = y - j0, fz = z - k0;
          double acc = 0.0;
          for (int dk = 0; dk < 2; ++dk) {
            const double wz = dk ? fz : 1.0 - fz;
            for (int dj = 0; dj < 2; ++dj) {
              const double wy = dj ? fy : 1.0 - fy;
              for (int di = 0; di < 2; ++di) {
                const double wx = di ? fx : 1.0 - fx;
                const int a = i0 + di, b = j0 + dj, c = k0 + dk;
                if (wx * wy * wz != 0.0 && src.in_bounds(a, b, c)) {
                  acc += wx * wy * wz * src.at(a, b, c);
                }
              }
            }
          }
          out.data[f] = acc;
        }
      }
    }
  }
  return out;
}

LabelMap apply_transform(const LabelMap& payload, const TransformField& field) {
  LabelMap out;
  out.vol = apply_transform(payload.vol, field, Interp::nearest);
  out.labels = payload.labels;
  return out;
}

LabelMap apply_transform(const LabelMap& payload, const TransformField& field,
                         Interp interp) {
  if (interp != Interp::nearest) {
    throw LabelInterpError("label maps require nearest interpolation");
  }
  return apply_transform(payload, field);
}

MultiChannelVolume apply_transform(const MultiChannelVolume& payload,
                                   const TransformField& field, Interp interp) {
  MultiChannelVolume out(payload.channels, payload.dims, payload.affine);
  for (int c = 0; c < payload.channels; ++c) {
    out.set_channel(c, apply_transform(payload.channel(c), field, interp));
  }
  return out;
}

Volume synthesize_intensities(const LabelMap& labels, const GmmParams& params, Rng& rng,
                              const BiasConfig& bias) {
  Volume img = detail::synthesize_raw(labels, params, rng);
  if (bias.enabled) {
    const double amp = rng.uniform(bias.amp_lo, bias.amp_hi);
    Volume noise(img.dims, img.affine);
    for (double& v : noise.data) v = rng.normal();
    Volume smooth = detail::gaussian_blur(
        noise, {bias.smooth_vox, bias.smooth_vox, bias.smooth_vox});
    double max_abs = 0.0;
    for (double v : smooth.data) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs > 0.0) {
      const double scale = amp / max_abs;
      for (std::size_t f = 0; f < img.size(); ++f) {
        img.data[f] *= std::exp(scale * smooth.data[f]);
      }
    }
  }
  return minmax_rescale(img);
}

Volume simulate_resolution(const Volume& image, Rng& rng, const ResolutionConfig& cfg) {
  if (!cfg.enabled) return image;
  const Vec3 native = image.spacing();
  Vec3 target, sigma_vox;
  for (int a = 0; a < 3; ++a) {
    const double lo = std::max(cfg.min_mm, native[a]);
    const double hi = std::max(lo, cfg.max_mm);
    target[a] = rng.uniform(lo, hi);
    // Additional blur needed so the effective FWHM reaches the target slice
    // thickness in quadrature with the native sampling.
    const double fwhm = std::sqrt(std::max(0.0, target[a] * target[a] - native[a] * native[a]));
    sigma_vox[a] = fwhm / 2.3548200450309493 / native[a];
  }
  const Volume blurred = detail::gaussian_blur(image, sigma_vox);

  Dims3 coarse_dims;
  Affine coarse_affine = image.affine;
  bool same_grid = true;
  for (int a = 0; a < 3; ++a) {
    const double ratio = target[a] / native[a];
    coarse_dims[a] = std::max(1, static_cast<int>(std::llround(image.dims[a] / ratio)));
    if (coarse_dims[a] != image.dims[a]) same_grid = false;
    for (int r = 0; r < 3; ++r) coarse_affine.at(r, a) *= ratio;
  }
  if (same_grid) return blurred;
  const Volume coarse = resample(blurred, coarse_dims, coarse_affine, Interp::trilinear);
  return resample(coarse, image.dims, image.affine, Interp::trilinear);
}

SynthSample make_training_sample(const LabelMap& l_crop, const MultiChannelVolume& c_crop,
                                 const SynthConfig& cfg, Rng& geo_rng, Rng& intensity_rng) {
  const TransformField field =
      random_geometric_transform(geo_rng, cfg.aug, l_crop.vol.dims, l_crop.vol.affine);
  const LabelMap warped = apply_transform(l_crop, field);
  const MultiChannelVolume coords_t = apply_transform(c_crop, field, Interp::trilinear);

  std::vector<int> ids = warped.distinct_ids();
  ids.push_back(0);
  const GmmParams params = sample_gmm_params(ids, intensity_rng, cfg.gmm);
  Volume synth = synthesize_intensities(warped, params, intensity_rng, cfg.bias);
  synth = simulate_resolution(synth, intensity_rng, cfg.res);

  SynthSample sample;
  sample.target.vol = Volume::zeros(warped.vol.dims, warped.vol.affine);
  for (std::size_t f = 0; f < warped.vol.size(); ++f) {
    const int id = warped.id_at(f);
    if (label_ids::in_band(id)) sample.target.vol.data[f] = static_cast<double>(id);
  }
  for (const auto& [id, name] : warped.labels) {
    if (label_ids::in_band(id)) sample.target.labels[id] = name;
  }

  const Volume fg = sample.target.mask_of(subregion_id_list());
  sample.distmap = distance_map(fg, default_clip_mm(fg));

  sample.input = MultiChannelVolume(4, synth.dims, synth.affine);
  sample.input.set_channel(0, synth);
  for (int c = 0; c < 3; ++c) sample.input.set_channel(c + 1, coords_t.channel(c));
  return sample;
}

SynthSample make_training_sample(const LabelMap& l_crop, const MultiChannelVolume& c_crop,
                                 const SynthConfig& cfg, const Rng& rng) {
  Rng geo = rng.derive(0x67656f);        // geometry stream
  Rng intensity = rng.derive(0x696e74);  // appearance stream
  return make_training_sample(l_crop, c_crop, cfg, geo, intensity);
}

}  // namespace hsx
