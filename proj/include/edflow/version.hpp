#pragma once

namespace edflow {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace edflow
