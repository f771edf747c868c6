#pragma once

#include <filesystem>

#include "hsx/unet.hpp"

namespace hsx {

// Single-file binary checkpoint: magic "HSXK", version u32, u64 JSON blob
// length + blob (network config, step counter, flags), then all parameters
// as little-endian f64 in declaration order. When optimizer state is saved
// (has_adam in the blob), the Adam first and second moments follow in the
// same order.
void save_checkpoint(const Model& model, const std::filesystem::path& path,
                     bool with_adam = true);

Model load_checkpoint(const std::filesystem::path& path);

}  // namespace hsx
