#pragma once

namespace nonlocal {

inline constexpr const char* kToolName = "nlneumann";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace nonlocal
