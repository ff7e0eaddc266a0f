// Library version string, recorded in reports and cache keys so that any
// change to the computational kernel invalidates previously cached artifacts.
#pragma once

namespace kjc {

inline constexpr const char* kCodeVersion = "kjc-1.0.0";

}  // namespace kjc
