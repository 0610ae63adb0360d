#pragma once

namespace karlin {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace karlin
