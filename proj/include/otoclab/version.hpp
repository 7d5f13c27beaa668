#pragma once

namespace otoclab {
inline constexpr const char* kVersion = "0.1.0";
}
