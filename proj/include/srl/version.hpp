#pragma once

namespace srl {

inline constexpr const char* kVersion = "0.1.0";

// Version of the on-disk formats and report schema. Bumped together: a
// report produced by format N can only be compared against format N.
inline constexpr int kFormatVersion = 1;

}  // namespace srl
