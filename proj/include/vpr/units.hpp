#pragma once

// Linear/logarithmic conversions. Everything inside the library is linear
// (watts, plain ratios); dB and dBm only appear at I/O boundaries.

#include <cmath>

namespace vpr {

[[nodiscard]] inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
[[nodiscard]] inline double linear_to_db(double ratio) { return 10.0 * std::log10(ratio); }

[[nodiscard]] inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
[[nodiscard]] inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts / 1e-3); }

}  // namespace vpr
