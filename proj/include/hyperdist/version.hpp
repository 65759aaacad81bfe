#pragma once

namespace hyperdist {

inline constexpr const char* kToolName = "hyperdist";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace hyperdist
