#pragma once

namespace leibenson {
inline constexpr const char* kVersion = "0.1.0";
}
