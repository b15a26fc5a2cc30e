#pragma once

#include <filesystem>

#include "srl/feature_grid.hpp"

// SRLF is the on-disk feature-grid format, all little-endian:
//
//   bytes 0..3    magic "SRLF"
//   bytes 4..7    u32 format version (currently 1)
//   bytes 8..11   u32 height
//   bytes 12..15  u32 width
//   bytes 16..19  u32 depth
//   bytes 20..    h*w*d float32 values, spatial-row-major, channel innermost
//
// Payloads are float32 for compactness; in-memory math is double. Writing
// quantizes each value to the nearest float32, so a grid round-trips
// bit-exactly iff its values are float32-representable (grids loaded from
// SRLF and synthetic grids always are).

namespace srl {

// Reads one grid. Throws DataError with byte-offset context on malformed
// files (bad magic, version mismatch, truncated payload, non-finite values).
FeatureGrid load_feature_grid(const std::filesystem::path& path);

// Writes one grid. Byte output is a pure function of the grid.
void save_feature_grid(const FeatureGrid& grid, const std::filesystem::path& path);

}  // namespace srl
