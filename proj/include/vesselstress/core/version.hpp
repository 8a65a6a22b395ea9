#pragma once

namespace vesselstress {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace vesselstress
