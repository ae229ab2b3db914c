#pragma once

namespace optex {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace optex
