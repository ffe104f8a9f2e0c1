#include "rngaudit/format.hpp"

#include <cstdio>
#include <cstdlib>

namespace rngaudit {

std::string format_temperature(double temperature) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", temperature);
    std::string out(buf);
    if (out.find('.') == std::string::npos && out.find('e') == std::string::npos &&
        out.find('E') == std::string::npos)
        out += ".0";
    return out;
}

std::optional<double> parse_temperature(std::string_view text) {
    if (text.empty()) return std::nullopt;
    const std::string buf(text);
    char* end = nullptr;
    const double value = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size()) return std::nullopt;
    return value;
}

}  // namespace rngaudit
