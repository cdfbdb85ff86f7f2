#pragma once

#include <string_view>

namespace tvcs {

inline constexpr std::string_view kName = "tvcs";
inline constexpr std::string_view kVersion = "0.1.0";

} // namespace tvcs
