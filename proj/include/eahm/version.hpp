#pragma once

namespace eahm {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace eahm
