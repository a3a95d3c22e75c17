#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "simulst/core/types.hpp"

namespace simulst::textproc {

namespace detail {

// Length in bytes of the UTF-8 sequence starting with `lead`. Invalid lead bytes count as one byte.
inline std::size_t utf8_length(unsigned char lead) {
    if (lead < 0x80)
        return 1;
    if ((lead >> 5) == 0x6)
        return 2;
    if ((lead >> 4) == 0xE)
        return 3;
    if ((lead >> 3) == 0x1E)
        return 4;
    return 1;
}

inline char32_t decode_at(std::string_view s, std::size_t pos, std::size_t len) {
    const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[pos + i]); };
    switch (len) {
    case 2:
        return ((byte(0) & 0x1Fu) << 6) | (byte(1) & 0x3Fu);
    case 3:
        return ((byte(0) & 0x0Fu) << 12) | ((byte(1) & 0x3Fu) << 6) | (byte(2) & 0x3Fu);
    case 4:
        return ((byte(0) & 0x07u) << 18) | ((byte(1) & 0x3Fu) << 12) | ((byte(2) & 0x3Fu) << 6) |
               (byte(3) & 0x3Fu);
    default:
        return byte(0);
    }
}

} // namespace detail

// One decoded code point with the byte range it occupies.
struct CodePoint {
    char32_t value;
    std::string_view bytes;
};

inline std::vector<CodePoint> code_points(std::string_view s) {
    std::vector<CodePoint> out;
    for (std::size_t pos = 0; pos < s.size();) {
        std::size_t len = detail::utf8_length(static_cast<unsigned char>(s[pos]));
        if (pos + len > s.size())
            len = 1;
        out.push_back({detail::decode_at(s, pos, len), s.substr(pos, len)});
        pos += len;
    }
    return out;
}

// Scripts written without inter-word spaces: CJK ideographs, kana, CJK punctuation and fullwidth forms.
inline bool is_cjk(char32_t c) {
    return (c >= 0x3000 && c <= 0x30FF) ||  // CJK punctuation, hiragana, katakana
           (c >= 0x3400 && c <= 0x4DBF) ||  // extension A
           (c >= 0x4E00 && c <= 0x9FFF) ||  // unified ideographs
           (c >= 0xF900 && c <= 0xFAFF) ||  // compatibility ideographs
           (c >= 0xFF00 && c <= 0xFFEF) ||  // halfwidth and fullwidth forms
           (c >= 0x20000 && c <= 0x2FA1F);
}

inline bool is_space(char32_t c) {
    return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\v' || c == U'\f' || c == 0x3000;
}

// Whitespace split; inside each piece every CJK character becomes its own token while runs of
// other characters stay together.
inline Tokens tokenize(std::string_view text) {
    Tokens out;
    std::string run;
    const auto flush = [&] {
        if (!run.empty()) {
            out.push_back(std::move(run));
            run.clear();
        }
    };
    for (const auto &cp : code_points(text)) {
        if (is_space(cp.value)) {
            flush();
        } else if (is_cjk(cp.value)) {
            flush();
            out.emplace_back(cp.bytes);
        } else {
            run.append(cp.bytes);
        }
    }
    flush();
    return out;
}

// Inverse of tokenize for normalized text: a space separates two tokens unless either side of the
// boundary is a CJK character.
inline std::string detokenize(const Tokens &tokens) {
    std::string out;
    char32_t prev_last = 0;
    bool first = true;
    for (const auto &tok : tokens) {
        if (tok.empty())
            continue;
        const auto cps = code_points(tok);
        if (!first && !is_cjk(prev_last) && !is_cjk(cps.front().value))
            out.push_back(' ');
        out += tok;
        prev_last = cps.back().value;
        first = false;
    }
    return out;
}

// Non-whitespace code points, the unit for length ratios and length differences.
inline std::size_t char_count(std::string_view text) {
    std::size_t n = 0;
    for (const auto &cp : code_points(text))
        n += is_space(cp.value) ? 0 : 1;
    return n;
}

inline std::size_t char_count(const Tokens &tokens) {
    std::size_t n = 0;
    for (const auto &tok : tokens)
        n += char_count(tok);
    return n;
}

inline std::string join(const Tokens &tokens, std::string_view sep = " ") {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i)
            out += sep;
        out += tokens[i];
    }
    return out;
}

} // namespace simulst::textproc
