#pragma once

namespace garmanet {

inline constexpr const char* kVersion = "0.1.0";

} // namespace garmanet
