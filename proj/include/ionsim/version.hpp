#pragma once

namespace ionsim {
inline constexpr const char* kVersion = "0.1.0";
}
