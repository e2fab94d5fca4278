#pragma once

namespace citytsp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace citytsp
