#pragma once

namespace eepred {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace eepred
