#pragma once

// Small text helpers shared by the file readers and writers.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hfslock::text {

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

std::string_view trim(std::string_view s) noexcept;

std::vector<std::string_view> split(std::string_view s, char sep);

/// Full-string parse; nullopt on trailing garbage or empty input.
std::optional<double> parse_double(std::string_view s) noexcept;
std::optional<long long> parse_int(std::string_view s) noexcept;

}  // namespace hfslock::text
