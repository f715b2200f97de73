#pragma once

namespace dqc1lab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dqc1lab
