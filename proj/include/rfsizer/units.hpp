#pragma once

#include <cmath>
#include <string>

namespace rfsizer {

inline constexpr double kSpeedOfLight = 2.99792458e8;  // m/s
inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline double db_from_power_ratio(double ratio) { return 10.0 * std::log10(ratio); }
inline double db_from_voltage_ratio(double ratio) { return 20.0 * std::log10(ratio); }
inline double power_ratio_from_db(double db) { return std::pow(10.0, db / 10.0); }

inline double dbm_from_watts(double w) { return 10.0 * std::log10(w / 1e-3); }
inline double watts_from_dbm(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

// Doubles formatted with 17 significant digits round-trip exactly; the
// output is locale-independent (std::to_chars).
std::string g17(double v);

// Shortest exact representation, for human-facing text and OCEAN scripts.
std::string format_compact(double v);

// Strict full-string double parse; returns false on trailing garbage.
bool parse_double(const std::string& text, double& out);

// FNV-1a, used for config fingerprints and model container checksums.
std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t seed = 0xcbf29ce484222325ull);
std::uint32_t crc32(const void* data, std::size_t n, std::uint32_t seed = 0);

}  // namespace rfsizer
