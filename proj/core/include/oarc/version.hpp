#pragma once

namespace oarc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace oarc
