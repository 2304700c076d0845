#pragma once

namespace qcrlab {
inline constexpr const char* kVersion = "0.1.0";
}
