#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

namespace bapmsim::units {

inline constexpr std::uint64_t kKiB = 1024ULL;
inline constexpr std::uint64_t kMiB = 1024ULL * kKiB;
inline constexpr std::uint64_t kGiB = 1024ULL * kMiB;
inline constexpr std::uint64_t kTiB = 1024ULL * kGiB;

/// Parses "512", "40MB", "1.5GB", "3TB" into bytes. Suffixes are powers of
/// 1024; fractional values are rounded to the nearest byte.
std::uint64_t parse_bytes(const std::string& text);

/// "7.50 GB"-style rendering, always powers of 1024.
std::string format_bytes(double bytes);

/// Accepts either a JSON number (raw bytes) or a suffixed string.
std::uint64_t bytes_field(const nlohmann::json& value);

/// Same but for rates (bytes/second); accepts numbers or suffixed strings.
double rate_field(const nlohmann::json& value);

} // namespace bapmsim::units
