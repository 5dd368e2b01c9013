#pragma once

namespace tfp {
inline constexpr const char* kVersion = "1.0.0";
}
