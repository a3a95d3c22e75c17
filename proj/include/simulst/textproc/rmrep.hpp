#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string_view>
#include <vector>

#include "simulst/core/types.hpp"
#include "simulst/textproc/tokenize.hpp"

namespace simulst::textproc {

// Repetition removal applied to generated output: a bracket filter for non-speech annotations such
// as "(拍手)" and a stop rule for runaway 3-gram loops.

namespace detail {

struct BracketPair {
    char32_t open;
    char32_t close;
};

inline constexpr std::array<BracketPair, 4> kBrackets{{
    {U'(', U')'},
    {U'<', U'>'},
    {U'（', U'）'}, // fullwidth parentheses
    {U'＜', U'＞'}, // fullwidth angle brackets
}};

inline const BracketPair *opener(char32_t c) {
    for (const auto &b : kBrackets)
        if (b.open == c)
            return &b;
    return nullptr;
}

inline const BracketPair *closer(char32_t c) {
    for (const auto &b : kBrackets)
        if (b.close == c)
            return &b;
    return nullptr;
}

struct BracketShape {
    bool wrapped = false;          // first character's opener is closed by the last character
    std::size_t unmatched_open = 0;
    std::size_t unmatched_close = 0;
};

inline BracketShape bracket_shape(std::string_view token) {
    BracketShape shape;
    const auto cps = code_points(token);
    std::vector<std::pair<const BracketPair *, std::size_t>> stack;
    for (std::size_t i = 0; i < cps.size(); ++i) {
        if (const auto *b = opener(cps[i].value)) {
            stack.emplace_back(b, i);
        } else if (const auto *b = closer(cps[i].value)) {
            if (!stack.empty() && stack.back().first == b) {
                if (stack.back().second == 0 && i + 1 == cps.size())
                    shape.wrapped = true;
                stack.pop_back();
            } else {
                ++shape.unmatched_close;
            }
        }
    }
    shape.unmatched_open = stack.size();
    return shape;
}

} // namespace detail

// keep[i] is false for tokens the bracket filter removes. A token is removed when it is fully wrapped
// in () or <> (or their fullwidth forms), or when it holds an unbalanced bracket fragment. A fragment
// that opens a unit ("(") also removes the tokens up to the fragment that closes it ("拍手)"); an
// opener that is never closed removes only itself.
inline std::vector<bool> bracketed_token_mask(const Tokens &tokens) {
    std::vector<bool> keep(tokens.size(), true);
    std::vector<detail::BracketShape> shapes;
    shapes.reserve(tokens.size());
    for (const auto &tok : tokens)
        shapes.push_back(detail::bracket_shape(tok));

    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto &s = shapes[i];
        if (s.wrapped || s.unmatched_close > 0) {
            keep[i] = false;
        } else if (s.unmatched_open > 0) {
            keep[i] = false;
            for (std::size_t j = i + 1; j < tokens.size(); ++j) {
                if (shapes[j].unmatched_close > 0) {
                    for (std::size_t k = i + 1; k <= j; ++k)
                        keep[k] = false;
                    i = j;
                    break;
                }
            }
        }
    }
    return keep;
}

inline Tokens remove_bracketed_tokens(const Tokens &tokens) {
    const auto keep = bracketed_token_mask(tokens);
    Tokens out;
    for (std::size_t i = 0; i < tokens.size(); ++i)
        if (keep[i])
            out.push_back(tokens[i]);
    return out;
}

// Number of leading tokens kept by the 3-gram stop rule: output stops right before the token that
// would complete the third occurrence of any 3-gram. Overlapping occurrences count.
inline std::size_t repeated_trigram_cutoff(const Tokens &tokens) {
    std::map<std::array<std::string_view, 3>, int> counts;
    for (std::size_t i = 2; i < tokens.size(); ++i) {
        const std::array<std::string_view, 3> key{tokens[i - 2], tokens[i - 1], tokens[i]};
        if (++counts[key] >= 3)
            return i;
    }
    return tokens.size();
}

inline Tokens stop_on_repeated_trigram(const Tokens &tokens) {
    return Tokens(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(repeated_trigram_cutoff(tokens)));
}

struct RmrepFlags {
    bool brackets = false;
    bool trigram = false;

    bool any() const { return brackets || trigram; }
    bool operator==(const RmrepFlags &) const = default;
};

// Combined keep mask over the original tokens. The trigram rule runs on the bracket-filtered stream,
// the order in which the two filters are listed for the Rmrep runs.
inline std::vector<bool> rmrep_mask(const Tokens &tokens, RmrepFlags flags) {
    std::vector<bool> keep = flags.brackets ? bracketed_token_mask(tokens) : std::vector<bool>(tokens.size(), true);
    if (!flags.trigram)
        return keep;
    Tokens kept;
    std::vector<std::size_t> origin;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (keep[i]) {
            kept.push_back(tokens[i]);
            origin.push_back(i);
        }
    }
    const std::size_t cutoff = repeated_trigram_cutoff(kept);
    for (std::size_t k = cutoff; k < kept.size(); ++k)
        keep[origin[k]] = false;
    return keep;
}

inline Tokens apply_rmrep(const Tokens &tokens, RmrepFlags flags) {
    const auto keep = rmrep_mask(tokens, flags);
    Tokens out;
    for (std::size_t i = 0; i < tokens.size(); ++i)
        if (keep[i])
            out.push_back(tokens[i]);
    return out;
}

} // namespace simulst::textproc
