#pragma once

namespace dde {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dde
