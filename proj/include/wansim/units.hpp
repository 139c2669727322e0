#pragma once

#include <limits>

namespace wansim {

// Conventions used throughout: volumes in bytes (decimal, 1 GB = 1e9 bytes),
// rates in bits per second, times in seconds. The byte/bit conversion factor
// is exactly 8; file formats carry decimal-unit fields (_gb, _gbps).
inline constexpr double kBitsPerByte = 8.0;
inline constexpr double kGiga = 1e9;

// Sentinel for empty-minimum conventions: identity-path bottlenecks,
// uncapped demands, unbounded load-generator volumes.
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

inline constexpr double gbps_to_bps(double gbps) { return gbps * kGiga; }
inline constexpr double bps_to_gbps(double bps) { return bps / kGiga; }
inline constexpr double gb_to_bytes(double gb) { return gb * kGiga; }
inline constexpr double bytes_to_gb(double bytes) { return bytes / kGiga; }

}  // namespace wansim
