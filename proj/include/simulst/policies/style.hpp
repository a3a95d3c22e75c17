#pragma once

#include <string>
#include <string_view>

#include "simulst/core/error.hpp"
#include "simulst/core/types.hpp"
#include "simulst/textproc/tags.hpp"

namespace simulst {

enum class StyleTag { kSI, kOffline, kNone };

inline std::string_view to_string(StyleTag tag) {
    switch (tag) {
    case StyleTag::kSI:
        return "si";
    case StyleTag::kOffline:
        return "off";
    case StyleTag::kNone:
        break;
    }
    return "none";
}

inline StyleTag parse_style_tag(std::string_view name) {
    if (name == "si" || name == "<si>")
        return StyleTag::kSI;
    if (name == "off" || name == "offline" || name == "<off>")
        return StyleTag::kOffline;
    if (name == "none" || name.empty())
        return StyleTag::kNone;
    throw ConfigError("unknown style tag '" + std::string(name) + "' (expected si, off or none)");
}

// Which tag is forced at the first decoding steps, and the exact tokens it is written as.
struct StyleTagChoice {
    StyleTag tag = StyleTag::kNone;
    Tokens tag_token_forms;

    static StyleTagChoice none() { return {}; }
    static StyleTagChoice si(const textproc::TagSpec &spec = textproc::si_tag()) {
        return {StyleTag::kSI, spec.token_forms};
    }
    static StyleTagChoice offline(const textproc::TagSpec &spec = textproc::off_tag()) {
        return {StyleTag::kOffline, spec.token_forms};
    }

    void validate() const {
        if (tag != StyleTag::kNone && tag_token_forms.empty())
            throw ConfigError("style tag '" + std::string(to_string(tag)) + "' has no token forms");
        if (tag == StyleTag::kNone && !tag_token_forms.empty())
            throw ConfigError("style tag 'none' must not carry token forms");
    }

    bool operator==(const StyleTagChoice &) const = default;
};

// One hypothesis request to an agent. The agent force-decodes `forced_prefix`, then `committed`,
// and continues freely; its answer starts with both.
struct AgentRequest {
    Tokens source_prefix;
    Tokens forced_prefix;
    Tokens committed;

    bool operator==(const AgentRequest &) const = default;
};

inline AgentRequest apply_forced_prefix(AgentRequest request, const StyleTagChoice &style) {
    if (style.tag == StyleTag::kNone)
        return request;
    style.validate();
    request.forced_prefix = style.tag_token_forms;
    return request;
}

// Removes the forced tag tokens from an agent answer. An answer that does not start with them
// breaks the protocol contract.
inline Tokens strip_forced_prefix(const Tokens &answer, const Tokens &forced_prefix) {
    if (!is_prefix_of(forced_prefix, answer))
        throw AgentError("agent hypothesis does not begin with the forced prefix");
    return Tokens(answer.begin() + static_cast<std::ptrdiff_t>(forced_prefix.size()), answer.end());
}

} // namespace simulst
