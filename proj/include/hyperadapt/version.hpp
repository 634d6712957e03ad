#pragma once

namespace hyperadapt {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hyperadapt
