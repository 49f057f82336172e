#pragma once

namespace lrising {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kSweepSchema = "lrising.sweep.v1";

}  // namespace lrising
