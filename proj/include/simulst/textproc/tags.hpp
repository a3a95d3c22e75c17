#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "simulst/core/types.hpp"

namespace simulst::textproc {

// A style tag as it appears in target strings (`surface`) and after subword tokenization
// (`token_forms`). A pretrained vocabulary without the tag splits it, e.g. "<si>" -> "_<" "si" ">".
struct TagSpec {
    std::string surface;
    Tokens token_forms;

    bool operator==(const TagSpec &) const = default;
};

inline TagSpec si_tag() { return {"<si>", {"_<", "si", ">"}}; }
inline TagSpec off_tag() { return {"<off>", {"_<", "off", ">"}}; }

inline std::string prepend_tag(std::string_view target, const TagSpec &tag) {
    std::string out;
    out.reserve(tag.surface.size() + target.size());
    out += tag.surface;
    out += target;
    return out;
}

inline bool has_tag(std::string_view text, const TagSpec &tag) {
    return !tag.surface.empty() && text.substr(0, tag.surface.size()) == tag.surface;
}

// Removes a leading tag surface; strings without the tag are returned unchanged.
inline std::string strip_tag(std::string_view text, const TagSpec &tag) {
    if (has_tag(text, tag))
        return std::string(text.substr(tag.surface.size()));
    return std::string(text);
}

inline Tokens prepend_tag_tokens(const Tokens &tokens, const TagSpec &tag) {
    Tokens out = tag.token_forms;
    out.insert(out.end(), tokens.begin(), tokens.end());
    return out;
}

// Removes leading tag token forms; returns nullopt when `tokens` does not start with them.
inline std::optional<Tokens> strip_tag_tokens(const Tokens &tokens, const TagSpec &tag) {
    if (!is_prefix_of(tag.token_forms, tokens))
        return std::nullopt;
    return Tokens(tokens.begin() + static_cast<std::ptrdiff_t>(tag.token_forms.size()), tokens.end());
}

// Reassembles a tag surface from its token forms, dropping the SentencePiece word-boundary marker
// ("_" in ASCII form or U+2581) from the first piece.
inline std::string surface_from_token_forms(const Tokens &forms) {
    std::string out;
    for (std::size_t i = 0; i < forms.size(); ++i) {
        std::string_view piece = forms[i];
        if (i == 0) {
            if (piece.starts_with("_"))
                piece.remove_prefix(1);
            else if (piece.starts_with("▁"))
                piece.remove_prefix(std::string_view("▁").size());
        }
        out += piece;
    }
    return out;
}

} // namespace simulst::textproc
