#pragma once

namespace hopred {
inline constexpr const char* version = "1.0.0";
}
