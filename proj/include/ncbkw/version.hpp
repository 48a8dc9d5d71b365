#pragma once

namespace ncbkw {

inline constexpr const char* kToolName = "ncbkw";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace ncbkw
