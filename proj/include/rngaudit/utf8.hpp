#pragma once

#include <cstdint>
#include <string_view>

namespace rngaudit {

struct Utf8Char {
    char32_t cp;
    int len;
};

/// Decodes the UTF-8 sequence starting at s[i]. Invalid bytes are passed
/// through one at a time so callers stay total on arbitrary input.
inline Utf8Char decode_utf8(std::string_view s, size_t i) {
    auto byte = [&](size_t k) { return static_cast<unsigned char>(s[k]); };
    unsigned char b0 = byte(i);
    if (b0 < 0x80) return {b0, 1};
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) { len = 2; cp = b0 & 0x1F; }
    else if ((b0 & 0xF0) == 0xE0) { len = 3; cp = b0 & 0x0F; }
    else if ((b0 & 0xF8) == 0xF0) { len = 4; cp = b0 & 0x07; }
    else return {b0, 1};
    if (i + len > s.size()) return {b0, 1};
    for (int k = 1; k < len; ++k) {
        unsigned char b = byte(i + k);
        if ((b & 0xC0) != 0x80) return {b0, 1};
        cp = (cp << 6) | (b & 0x3F);
    }
    return {cp, len};
}

}  // namespace rngaudit
