#pragma once

#include <stdexcept>
#include <string>

namespace hsx {

// Error taxonomy shared by all modules. Everything derives from Error so
// callers (and the CLI exit-code mapping) can catch by family.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File payload is not what the format requires (bad magic, truncated, ...).
struct FormatError : Error {
  using Error::Error;
};

struct UnsupportedDtype : FormatError {
  using FormatError::FormatError;
};

// Value cannot be represented in the requested on-disk dtype.
struct RangeError : Error {
  using Error::Error;
};

// Affine/grid problems: singular matrices, mismatched grids.
struct GeometryError : Error {
  using Error::Error;
};

// Trilinear interpolation requested for an integer label payload.
struct LabelInterpError : GeometryError {
  using GeometryError::GeometryError;
};

// Unknown or unmapped label id.
struct LabelError : Error {
  using Error::Error;
};

// Mask is not binary, or a required foreground is empty.
struct MaskError : Error {
  using Error::Error;
};

// Tensor shape mismatch.
struct ShapeError : Error {
  using Error::Error;
};

// Backward called without the forward context it needs.
struct StateError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Statistics input problems: empty groups, nonpositive TIV, p outside [0,1].
struct DataError : Error {
  using Error::Error;
};

// Degenerate statistical input (all-zero differences, zero variance).
struct DegenerateError : DataError {
  using DataError::DataError;
};

// Fewer distinct intensities than requested clusters.
struct DegenerateClusterError : DegenerateError {
  using DegenerateError::DegenerateError;
};

// AVD on an empty point set.
struct EmptySetError : DataError {
  using DataError::DataError;
};

// Required input file is absent.
struct MissingInputError : Error {
  using Error::Error;
};

// Checkpoint missing, corrupt, or incompatible with the requested config.
struct CheckpointError : Error {
  using Error::Error;
};

}  // namespace hsx
