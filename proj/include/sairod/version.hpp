#pragma once

namespace sairod {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sairod
