#pragma once

#include <filesystem>

#include "meg/registry.hpp"

namespace meg {

/// Binary parameter container (see docs/checkpoint-format.md):
///   magic "MEGCKPT1", u64 entry count, then per entry
///   u64 name length, name bytes, u64 rank, u64 dims..., f64 data...
/// All integers and floats little-endian. Entries are written in ascending
/// name order so identical parameter sets serialize byte-identically.
void save_checkpoint(const ParamRegistry& registry, const std::filesystem::path& path);

/// Loads parameter values into an existing registry. Every entry in the file
/// must exist in the registry with the same shape, and vice versa.
void load_checkpoint(ParamRegistry& registry, const std::filesystem::path& path);

}  // namespace meg
