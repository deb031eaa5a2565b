#pragma once

namespace scanverif {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace scanverif
