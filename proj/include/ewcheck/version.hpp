#pragma once

namespace ew {

inline constexpr const char* kEngineName = "ewcheck";
inline constexpr const char* kEngineVersion = "0.1.0";

}  // namespace ew
