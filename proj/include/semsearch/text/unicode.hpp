#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>

// Minimal UTF-8 helpers: decoding, simple lowercase folding for the Latin,
// Greek and Cyrillic blocks, and general-category tests for punctuation and
// white space. Invalid byte sequences are passed through untouched.

namespace semsearch::unicode {

struct decoded {
    char32_t cp = 0;
    std::size_t length = 1;
    bool valid = false;
};

inline decoded decode(std::string_view s, std::size_t pos) {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80) return {b0, 1, true};
    std::size_t len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return {b0, 1, false};
    }
    if (pos + len > s.size()) return {b0, 1, false};
    for (std::size_t i = 1; i < len; ++i) {
        const auto b = static_cast<unsigned char>(s[pos + i]);
        if ((b & 0xC0) != 0x80) return {b0, 1, false};
        cp = (cp << 6) | (b & 0x3F);
    }
    constexpr std::array<char32_t, 5> min_for_len{0, 0, 0x80, 0x800, 0x10000};
    if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return {b0, 1, false};
    return {cp, len, true};
}

inline void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

constexpr bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

/// Simple (one-to-one) lowercase mapping.
constexpr char32_t to_lower(char32_t cp) {
    if (in(cp, 'A', 'Z')) return cp + 32;
    if (cp < 0xC0) return cp;
    if (in(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 32;
    if (cp == 0x130) return 'i';
    if (in(cp, 0x100, 0x137) || in(cp, 0x14A, 0x177)) return (cp % 2 == 0) ? cp + 1 : cp;
    if (in(cp, 0x139, 0x148) || in(cp, 0x179, 0x17E)) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp == 0x178) return 0xFF;
    if (cp == 0x386) return 0x3AC;
    if (in(cp, 0x388, 0x38A)) return cp + 37;
    if (cp == 0x38C) return 0x3CC;
    if (in(cp, 0x38E, 0x38F)) return cp + 63;
    if (in(cp, 0x391, 0x3A9) && cp != 0x3A2) return cp + 32;
    if (in(cp, 0x400, 0x40F)) return cp + 80;
    if (in(cp, 0x410, 0x42F)) return cp + 32;
    if (in(cp, 0x460, 0x481) || in(cp, 0x48A, 0x4BF)) return (cp % 2 == 0) ? cp + 1 : cp;
    if (in(cp, 0x1E00, 0x1E95) || in(cp, 0x1EA0, 0x1EFF)) return (cp % 2 == 0) ? cp + 1 : cp;
    if (in(cp, 0xFF21, 0xFF3A)) return cp + 32;
    return cp;
}

constexpr bool is_space(char32_t cp) {
    return in(cp, 0x09, 0x0D) || cp == 0x20 || cp == 0x85 || cp == 0xA0 || cp == 0x1680 ||
           in(cp, 0x2000, 0x200A) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F ||
           cp == 0x3000;
}

/// Unicode general category P* (connector, dash, open, close, initial,
/// final and other punctuation). Currency and math symbols are not
/// punctuation.
constexpr bool is_punctuation(char32_t cp) {
    if (cp < 0x80) {
        switch (cp) {
            case '!': case '"': case '#': case '%': case '&': case '\'': case '(': case ')':
            case '*': case ',': case '-': case '.': case '/': case ':': case ';': case '?':
            case '@': case '[': case '\\': case ']': case '_': case '{': case '}':
                return true;
            default:
                return false;
        }
    }
    switch (cp) {
        case 0xA1: case 0xA7: case 0xAB: case 0xB6: case 0xB7: case 0xBB: case 0xBF:
        case 0x37E: case 0x387: case 0x589: case 0x58A:
        case 0x207D: case 0x207E: case 0x208D: case 0x208E:
        case 0x2329: case 0x232A:
        case 0xFE63: case 0xFE68: case 0xFE6A: case 0xFE6B:
        case 0xFF1A: case 0xFF1B: case 0xFF1F: case 0xFF20: case 0xFF3F: case 0xFF5B: case 0xFF5D:
            return true;
        default:
            break;
    }
    return in(cp, 0x55A, 0x55F) || in(cp, 0x2010, 0x2027) || in(cp, 0x2030, 0x2043) ||
           in(cp, 0x2045, 0x2051) || in(cp, 0x2053, 0x205E) || in(cp, 0x2308, 0x230B) ||
           in(cp, 0x2E00, 0x2E4F) || in(cp, 0x3001, 0x3003) || in(cp, 0x3008, 0x3011) ||
           in(cp, 0x3014, 0x301F) || in(cp, 0xFE10, 0xFE19) || in(cp, 0xFE30, 0xFE52) ||
           in(cp, 0xFE54, 0xFE61) || in(cp, 0xFF01, 0xFF03) || in(cp, 0xFF05, 0xFF0A) ||
           in(cp, 0xFF0C, 0xFF0F) || in(cp, 0xFF3B, 0xFF3D) || in(cp, 0xFF5F, 0xFF65);
}

/// Lowercases every cased letter, leaving all other bytes unchanged.
inline std::string lowercase(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t pos = 0; pos < s.size();) {
        const auto d = decode(s, pos);
        if (!d.valid) {
            out.push_back(s[pos]);
        } else {
            const auto lower = to_lower(d.cp);
            if (lower == d.cp)
                out.append(s.substr(pos, d.length));
            else
                append_utf8(out, lower);
        }
        pos += d.length;
    }
    return out;
}

/// Length in bytes of the trailing code point ending at `end` (exclusive).
inline std::size_t last_cp_start(std::string_view s, std::size_t end) {
    std::size_t start = end - 1;
    while (start > 0 && end - start < 4 && (static_cast<unsigned char>(s[start]) & 0xC0) == 0x80) --start;
    const auto d = decode(s, start);
    if (d.valid && start + d.length == end) return start;
    return end - 1;
}

/// Strips leading and trailing code points matching `pred`.
template <typename Pred>
std::string_view trim_if(std::string_view s, Pred pred) {
    std::size_t begin = 0;
    while (begin < s.size()) {
        const auto d = decode(s, begin);
        if (!d.valid || !pred(d.cp)) break;
        begin += d.length;
    }
    std::size_t end = s.size();
    while (end > begin) {
        const auto start = last_cp_start(s, end);
        const auto d = decode(s, start);
        if (!d.valid || start + d.length != end || !pred(d.cp)) break;
        end = start;
    }
    return s.substr(begin, end - begin);
}

inline std::string_view trim_space(std::string_view s) {
    return trim_if(s, [](char32_t cp) { return is_space(cp); });
}

}  // namespace semsearch::unicode
