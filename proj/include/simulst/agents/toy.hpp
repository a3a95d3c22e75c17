#pragma once

#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "simulst/agents/agent.hpp"
#include "simulst/core/error.hpp"
#include "simulst/core/types.hpp"
#include "simulst/textproc/tags.hpp"

namespace simulst {

enum class ToyStyle { kSI, kOffline };

// Word-for-word lexicon behind the built-in toy translator.
//
// The SI style maps the prefix monotonically and drops `function_words`. The offline style keeps
// every mapped word but pushes each verb up to `reorder_window` positions toward the end of its clause,
// so its early hypotheses get revised once more source arrives. An entry mapping to "" is never emitted.
struct ToyLexicon {
    std::map<std::string, std::string> entries;
    std::set<std::string> function_words;
    std::set<std::string> verbs;
    std::set<std::string> clause_breaks;
    std::size_t reorder_window = 3;

    std::optional<std::string> lookup(const std::string &source) const {
        if (auto it = entries.find(source); it != entries.end())
            return it->second;
        return std::nullopt;
    }

    // Unknown words map to a visible placeholder so the map is total.
    std::string translate_word(const std::string &source) const {
        if (auto hit = lookup(source))
            return *hit;
        return "UNK_" + source;
    }
};

inline ToyLexicon lexicon_from_json(const nlohmann::json &j) {
    ToyLexicon lex;
    try {
        lex.entries = j.at("entries").get<std::map<std::string, std::string>>();
        if (j.contains("function_words"))
            lex.function_words = j.at("function_words").get<std::set<std::string>>();
        if (j.contains("verbs"))
            lex.verbs = j.at("verbs").get<std::set<std::string>>();
        if (j.contains("clause_breaks"))
            lex.clause_breaks = j.at("clause_breaks").get<std::set<std::string>>();
        if (j.contains("reorder_window"))
            lex.reorder_window = j.at("reorder_window").get<std::size_t>();
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("invalid toy lexicon: ") + e.what());
    }
    return lex;
}

inline ToyLexicon load_lexicon(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open lexicon '" + path + "'");
    try {
        return lexicon_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError("lexicon '" + path + "' is not valid JSON: " + e.what());
    }
}

inline nlohmann::json lexicon_to_json(const ToyLexicon &lex) {
    return {{"entries", lex.entries},
            {"function_words", lex.function_words},
            {"verbs", lex.verbs},
            {"clause_breaks", lex.clause_breaks},
            {"reorder_window", lex.reorder_window}};
}

inline Tokens toy_translate(const ToyLexicon &lex, const Tokens &prefix, ToyStyle style) {
    if (style == ToyStyle::kSI) {
        Tokens out;
        for (const auto &src : prefix) {
            if (lex.function_words.contains(src))
                continue;
            auto word = lex.translate_word(src);
            if (!word.empty())
                out.push_back(std::move(word));
        }
        return out;
    }

    Tokens out;
    std::vector<std::pair<std::string, bool>> clause; // (target word, is_verb)
    const auto close_clause = [&] {
        // Right to left so that no verb jumps over one already moved.
        std::size_t limit = clause.size();
        for (std::size_t i = clause.size(); i-- > 0;) {
            if (!clause[i].second)
                continue;
            const std::size_t target = std::min(i + lex.reorder_window, limit - 1);
            auto verb = clause[i];
            clause.erase(clause.begin() + static_cast<std::ptrdiff_t>(i));
            clause.insert(clause.begin() + static_cast<std::ptrdiff_t>(target), std::move(verb));
            limit = target;
        }
        for (auto &w : clause)
            out.push_back(std::move(w.first));
        clause.clear();
    };
    for (const auto &src : prefix) {
        auto word = lex.translate_word(src);
        if (lex.clause_breaks.contains(src)) {
            close_clause();
            if (!word.empty())
                out.push_back(std::move(word));
            continue;
        }
        if (!word.empty())
            clause.emplace_back(std::move(word), lex.verbs.contains(src));
    }
    close_clause();
    return out;
}

// `committed` followed by the words of `hypothesis` not already used by `committed`, in hypothesis
// order. Equals `hypothesis` whenever it already extends `committed`.
inline Tokens continue_from(const Tokens &committed, const Tokens &hypothesis) {
    if (is_prefix_of(committed, hypothesis))
        return hypothesis;
    std::map<std::string_view, std::size_t> used;
    for (const auto &t : committed)
        ++used[t];
    Tokens out = committed;
    for (const auto &t : hypothesis) {
        if (auto it = used.find(t); it != used.end() && it->second > 0) {
            --it->second;
            continue;
        }
        out.push_back(t);
    }
    return out;
}

// Deterministic built-in agent. The forced prefix selects the style (<si> or <off> in any token
// split); an empty forced prefix uses the configured default style.
class ToyAgent : public Agent {
  public:
    explicit ToyAgent(ToyLexicon lexicon, ToyStyle default_style = ToyStyle::kOffline)
        : lexicon_(std::move(lexicon)), default_style_(default_style) {}

    const ToyLexicon &lexicon() const { return lexicon_; }

    ToyStyle style_for(const Tokens &forced_prefix) const {
        if (forced_prefix.empty())
            return default_style_;
        const auto surface = textproc::surface_from_token_forms(forced_prefix);
        if (surface == "<si>")
            return ToyStyle::kSI;
        if (surface == "<off>")
            return ToyStyle::kOffline;
        throw AgentError("toy agent rejects forced prefix '" + surface + "'");
    }

    Tokens hypothesize(const AgentRequest &request) override {
        const ToyStyle style = style_for(request.forced_prefix);
        Tokens out = request.forced_prefix;
        const auto body = continue_from(request.committed, toy_translate(lexicon_, request.source_prefix, style));
        out.insert(out.end(), body.begin(), body.end());
        return out;
    }

  private:
    ToyLexicon lexicon_;
    ToyStyle default_style_;
};

} // namespace simulst
