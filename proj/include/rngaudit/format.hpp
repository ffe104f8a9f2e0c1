#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace rngaudit {

/// Canonical temperature rendering used in file names and mock-script keys:
/// shortest %.6g form, with ".0" appended to bare integers ("1.0", "0.1").
std::string format_temperature(double temperature);

std::optional<double> parse_temperature(std::string_view text);

}  // namespace rngaudit
