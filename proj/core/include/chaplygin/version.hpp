#pragma once

namespace chaplygin {
inline constexpr const char* kVersion = "0.1.0";
}
