#pragma once

#include <string_view>

namespace anholonome {

inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace anholonome
