#pragma once

namespace spheremaps {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spheremaps
