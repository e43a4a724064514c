#pragma once

namespace sgrf {

inline constexpr const char* kVersion = "0.1.0";

// Bumped when the JSON layout of persisted models changes.
inline constexpr int kModelFormatVersion = 1;

}  // namespace sgrf
