#pragma once

namespace covcap {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace covcap
