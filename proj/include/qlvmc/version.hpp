#pragma once

namespace qlvmc {

// Library version embedded in every report so results can be traced to the
// code that produced them.
inline constexpr const char* library_version = "1.0.0";

}  // namespace qlvmc
