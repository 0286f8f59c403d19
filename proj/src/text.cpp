#include "tabkg/text.hpp"

#include <array>
#include <cctype>
#include <cstdint>

namespace tabkg {
namespace {

constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decodes one code point starting at text[pos]; advances pos. Malformed
// sequences yield kInvalid and consume a single byte.
char32_t decode_utf8(std::string_view text, std::size_t& pos) {
    const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
    const unsigned char lead = byte(pos);
    if (lead < 0x80) {
        ++pos;
        return lead;
    }
    std::size_t length = 0;
    char32_t cp = 0;
    if ((lead & 0xE0) == 0xC0) {
        length = 2;
        cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
        length = 3;
        cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
        length = 4;
        cp = lead & 0x07;
    } else {
        ++pos;
        return kInvalid;
    }
    if (pos + length > text.size()) {
        ++pos;
        return kInvalid;
    }
    for (std::size_t i = 1; i < length; ++i) {
        const unsigned char cont = byte(pos + i);
        if ((cont & 0xC0) != 0x80) {
            ++pos;
            return kInvalid;
        }
        cp = (cp << 6) | (cont & 0x3F);
    }
    pos += length;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
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

bool is_word_char(char32_t cp) {
    if (cp == kInvalid) return false;
    if (cp < 0x80) return std::isalnum(static_cast<int>(cp)) != 0;
    if (cp <= 0xBF) return false;                     // C1 controls, Latin-1 punctuation
    if (cp == 0xD7 || cp == 0xF7) return false;       // multiplication / division signs
    if (cp >= 0x2000 && cp <= 0x2BFF) return false;   // punctuation, symbols, arrows, math
    if (cp >= 0x2E00 && cp <= 0x2E7F) return false;
    if (cp >= 0x3000 && cp <= 0x303F) return false;   // CJK symbols and punctuation
    if (cp >= 0xFE30 && cp <= 0xFE4F) return false;
    if (cp >= 0xFF01 && cp <= 0xFF0F) return false;   // fullwidth punctuation
    if (cp >= 0xFF1A && cp <= 0xFF20) return false;
    if (cp >= 0xFF3B && cp <= 0xFF40) return false;
    if (cp >= 0xFF5B && cp <= 0xFF65) return false;
    if (cp >= 0xFE00 && cp <= 0xFE0F) return false;   // variation selectors
    if (cp == 0xFEFF) return false;                   // BOM
    return true;
}

char32_t to_lower(char32_t cp) {
    if (cp < 0x80) return static_cast<char32_t>(std::tolower(static_cast<int>(cp)));
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    if (cp >= 0x100 && cp <= 0x137) return cp | 1;
    if (cp >= 0x139 && cp <= 0x148) return (cp & 1) ? cp + 1 : cp;
    if (cp >= 0x14A && cp <= 0x177) return cp | 1;
    if (cp == 0x178) return 0xFF;
    if (cp >= 0x179 && cp <= 0x17E) return (cp & 1) ? cp + 1 : cp;
    if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;
    if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
    if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
    return cp;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!is_digit(c)) return false;
    return true;
}

int to_int(std::string_view s) {
    int v = 0;
    for (char c : s) v = v * 10 + (c - '0');
    return v;
}

bool valid_month_day(int month, int day) {
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

// hh:mm[:ss[.fff]][Z|±hh:mm]
bool is_time(std::string_view t) {
    if (t.size() < 5 || !all_digits(t.substr(0, 2)) || t[2] != ':' || !all_digits(t.substr(3, 2)))
        return false;
    if (to_int(t.substr(0, 2)) > 24 || to_int(t.substr(3, 2)) > 59) return false;
    std::size_t pos = 5;
    if (pos < t.size() && t[pos] == ':') {
        if (pos + 3 > t.size() || !all_digits(t.substr(pos + 1, 2))) return false;
        pos += 3;
        if (pos < t.size() && t[pos] == '.') {
            ++pos;
            const std::size_t start = pos;
            while (pos < t.size() && is_digit(t[pos])) ++pos;
            if (pos == start) return false;
        }
    }
    if (pos == t.size()) return true;
    if (t[pos] == 'Z') return pos + 1 == t.size();
    if (t[pos] == '+' || t[pos] == '-') {
        const auto zone = t.substr(pos + 1);
        return (zone.size() == 5 && all_digits(zone.substr(0, 2)) && zone[2] == ':' &&
                all_digits(zone.substr(3, 2))) ||
               (zone.size() == 4 && all_digits(zone)) || (zone.size() == 2 && all_digits(zone));
    }
    return false;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const char32_t cp = decode_utf8(text, pos);
        if (is_word_char(cp)) {
            append_utf8(current, to_lower(cp));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::string normalized_key(std::string_view text) {
    std::string key;
    for (const auto& token : tokenize(text)) {
        if (!key.empty()) key.push_back(' ');
        key += token;
    }
    return key;
}

std::string_view trim(std::string_view text) {
    const auto is_space = [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    };
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && is_space(text[begin])) ++begin;
    while (end > begin && is_space(text[end - 1])) --end;
    return text.substr(begin, end - begin);
}

bool is_numeric(std::string_view text) {
    // Multi-byte currency signs: € £ ¥ ₹ ¢ in UTF-8.
    static constexpr std::array<std::string_view, 5> kCurrency = {
        "\xE2\x82\xAC", "\xC2\xA3", "\xC2\xA5", "\xE2\x82\xB9", "\xC2\xA2"};
    std::string stripped;
    stripped.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        bool skipped = false;
        for (auto sign : kCurrency) {
            if (text.substr(i, sign.size()) == sign) {
                i += sign.size();
                skipped = true;
                break;
            }
        }
        if (skipped) continue;
        const char c = text[i++];
        if (c == ',' || c == '$') continue;
        stripped.push_back(c);
    }
    const std::string_view s = trim(stripped);

    std::size_t pos = 0;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
    std::size_t int_digits = 0;
    while (pos < s.size() && is_digit(s[pos])) {
        ++pos;
        ++int_digits;
    }
    std::size_t frac_digits = 0;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        while (pos < s.size() && is_digit(s[pos])) {
            ++pos;
            ++frac_digits;
        }
    }
    if (int_digits + frac_digits == 0) return false;
    if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
        ++pos;
        if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
        std::size_t exp_digits = 0;
        while (pos < s.size() && is_digit(s[pos])) {
            ++pos;
            ++exp_digits;
        }
        if (exp_digits == 0) return false;
    }
    return pos == s.size();
}

bool is_date(std::string_view text) {
    const std::string_view s = trim(text);
    // YYYY-MM-DD with optional time, or YYYY-MM.
    if (s.size() >= 7 && all_digits(s.substr(0, 4)) && s[4] == '-' && all_digits(s.substr(5, 2))) {
        const int month = to_int(s.substr(5, 2));
        if (s.size() == 7) return month >= 1 && month <= 12;
        if (s.size() >= 10 && s[7] == '-' && all_digits(s.substr(8, 2))) {
            if (!valid_month_day(month, to_int(s.substr(8, 2)))) return false;
            if (s.size() == 10) return true;
            if (s[10] == 'T' || s[10] == ' ') return is_time(s.substr(11));
        }
        return false;
    }
    // DD-MM-YYYY, DD/MM/YYYY, DD.MM.YYYY (one-digit day or month allowed).
    std::size_t first = s.find_first_of("-/.");
    if (first == std::string_view::npos || first == 0 || first > 2) return false;
    const char sep = s[first];
    const std::size_t second = s.find(sep, first + 1);
    if (second == std::string_view::npos || second - first - 1 == 0 || second - first - 1 > 2)
        return false;
    const auto day = s.substr(0, first);
    const auto month = s.substr(first + 1, second - first - 1);
    const auto year = s.substr(second + 1);
    if (!all_digits(day) || !all_digits(month) || year.size() != 4 || !all_digits(year)) return false;
    return valid_month_day(to_int(month), to_int(day));
}

}  // namespace tabkg
