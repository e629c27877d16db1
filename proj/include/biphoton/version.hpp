#pragma once

namespace biphoton {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "cdsim";

} // namespace biphoton
