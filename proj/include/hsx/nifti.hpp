#pragma once

#include <filesystem>
#include <string>

#include "hsx/volume.hpp"

namespace hsx {

// On-disk datatype codes, values as in the NIfTI-1 header field.
enum class Dtype : short {
  u8 = 2,
  i16 = 4,
  i32 = 8,
  f32 = 16,
  f64 = 64,
};

// Reads a NIfTI-1 volume (.nii or .nii.gz, detected by gzip magic bytes).
// The affine is the sform when sform_code > 0, else the qform, else a
// pixdim-scaled identity. Values are widened to double losslessly.
Volume load_volume(const std::filesystem::path& path);

// Writes a NIfTI-1 file; gzip-compressed when the path ends in ".gz".
// pixdim[1..3] and the sform rows are populated from vol.affine. Values are
// range-checked against the dtype before quantization.
void save_volume(const Volume& vol, const std::filesystem::path& path, Dtype dtype);

// LabelMap variants: on save the id->name dictionary goes to a JSON sidecar
// ("x.nii.gz" -> "x.labels.json"); on load the sidecar is read when present,
// otherwise entries are synthesized as "label-<id>".
LabelMap load_labelmap(const std::filesystem::path& path);
void save_labelmap(const LabelMap& lm, const std::filesystem::path& path,
                   Dtype dtype = Dtype::i16);

// Sidecar path for a NIfTI path: strips .nii/.nii.gz, appends the tag.
std::filesystem::path sidecar_path(const std::filesystem::path& nifti_path,
                                   const std::string& tag);

}  // namespace hsx
