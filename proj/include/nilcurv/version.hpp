#pragma once

namespace nilcurv {

inline constexpr const char* kVersion = "0.1.0";

} // namespace nilcurv
