#include "bapmsim/units.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace bapmsim::units {

namespace {

double suffix_multiplier(std::string unit) {
    for (auto& c : unit) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (unit.empty() || unit == "B") return 1.0;
    if (unit == "K" || unit == "KB" || unit == "KIB") return static_cast<double>(kKiB);
    if (unit == "M" || unit == "MB" || unit == "MIB") return static_cast<double>(kMiB);
    if (unit == "G" || unit == "GB" || unit == "GIB") return static_cast<double>(kGiB);
    if (unit == "T" || unit == "TB" || unit == "TIB") return static_cast<double>(kTiB);
    throw std::invalid_argument("unknown byte suffix: " + unit);
}

} // namespace

std::uint64_t parse_bytes(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty byte quantity");
    std::size_t i = 0;
    while (i < text.size() &&
           (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) {
        ++i;
    }
    if (i == 0) throw std::invalid_argument("byte quantity must start with a number: " + text);
    double value = std::stod(text.substr(0, i));
    while (i < text.size() && text[i] == ' ') ++i;
    double bytes = value * suffix_multiplier(text.substr(i));
    if (bytes < 0) throw std::invalid_argument("negative byte quantity: " + text);
    return static_cast<std::uint64_t>(std::llround(bytes));
}

std::string format_bytes(double bytes) {
    const char* units[] = {"B", "KB", "MB", "GB", "TB"};
    int u = 0;
    while (bytes >= 1024.0 && u < 4) {
        bytes /= 1024.0;
        ++u;
    }
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f %s", bytes, units[u]);
    return buf;
}

std::uint64_t bytes_field(const nlohmann::json& value) {
    if (value.is_number()) {
        double v = value.get<double>();
        if (v < 0) throw std::invalid_argument("negative byte quantity");
        return static_cast<std::uint64_t>(std::llround(v));
    }
    if (value.is_string()) return parse_bytes(value.get<std::string>());
    throw std::invalid_argument("byte quantity must be a number or a suffixed string");
}

double rate_field(const nlohmann::json& value) {
    if (value.is_number()) return value.get<double>();
    if (value.is_string()) return static_cast<double>(parse_bytes(value.get<std::string>()));
    throw std::invalid_argument("rate must be a number or a suffixed string");
}

} // namespace bapmsim::units
