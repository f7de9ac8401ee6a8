#pragma once

namespace qduet {

inline constexpr const char* version = "0.1.0";

}  // namespace qduet
