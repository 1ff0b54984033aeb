#pragma once

namespace ssf {

inline constexpr const char* version = "0.1.0";

}  // namespace ssf
