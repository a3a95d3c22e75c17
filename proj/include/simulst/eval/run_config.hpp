#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "simulst/agents/handle.hpp"
#include "simulst/core/error.hpp"
#include "simulst/core/types.hpp"
#include "simulst/policies/policy.hpp"
#include "simulst/policies/style.hpp"
#include "simulst/textproc/rmrep.hpp"
#include "simulst/textproc/tags.hpp"

namespace simulst::eval {

// Segment sizes of the standard sweep, in ms.
inline const std::vector<Millis> kDefaultSegmentSizes{200, 400, 600, 800, 1000};

struct RunConfig {
    std::string corpus_path;
    std::string system; // report label; derived from policy and style when empty
    AgentHandle agent;
    PolicyConfig policy;
    StyleTag style = StyleTag::kNone;
    textproc::TagSpec si_tag = textproc::si_tag();
    textproc::TagSpec off_tag = textproc::off_tag();
    // Reference scored against; defaults to the style's reference (offline for untagged runs).
    std::optional<StyleTag> reference;
    std::vector<Millis> segment_sizes_ms = kDefaultSegmentSizes;
    textproc::RmrepFlags rmrep;
    // AL's ideal rate from the reference length instead of the hypothesis length.
    bool al_reference_length = false;
    std::string output_dir;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;

    StyleTagChoice style_choice() const {
        switch (style) {
        case StyleTag::kSI:
            return StyleTagChoice::si(si_tag);
        case StyleTag::kOffline:
            return StyleTagChoice::offline(off_tag);
        case StyleTag::kNone:
            break;
        }
        return StyleTagChoice::none();
    }

    StyleTag reference_style() const {
        if (reference)
            return *reference;
        return style == StyleTag::kSI ? StyleTag::kSI : StyleTag::kOffline;
    }

    std::string system_label() const {
        if (!system.empty())
            return system;
        std::string label = policy.kind == PolicyKind::kLocalAgreement ? "la" + std::to_string(policy.la_n)
                                                                       : "wait" + std::to_string(policy.k);
        label += "-";
        label += to_string(style);
        if (rmrep.any())
            label += "-rmrep";
        return label;
    }

    void validate() const {
        if (corpus_path.empty())
            throw ConfigError("no corpus given");
        if (segment_sizes_ms.empty())
            throw ConfigError("segment_sizes_ms must not be empty");
        for (auto s : segment_sizes_ms)
            if (s <= 0)
                throw ConfigError("segment sizes must be positive, got " + std::to_string(s));
        if (jobs == 0)
            throw ConfigError("jobs must be at least 1");
        if (reference && *reference == StyleTag::kNone)
            throw ConfigError("reference must be si or off");
        policy.validate();
        agent.validate();
        style_choice().validate();
    }
};

namespace detail {

inline std::string resolve(const std::filesystem::path &base, const std::string &p) {
    if (p.empty())
        return p;
    const std::filesystem::path path(p);
    return path.is_absolute() ? p : (base / path).lexically_normal().string();
}

inline textproc::TagSpec tag_from_json(const nlohmann::json &j, textproc::TagSpec fallback) {
    if (j.contains("surface"))
        fallback.surface = j.at("surface").get<std::string>();
    if (j.contains("tokens"))
        fallback.token_forms = j.at("tokens").get<Tokens>();
    return fallback;
}

} // namespace detail

// Reads a run-config JSON object. Input paths (corpus, lexicon) are resolved against `base_dir`.
inline RunConfig run_config_from_json(const nlohmann::json &j, const std::filesystem::path &base_dir = {}) {
    RunConfig c;
    try {
        c.corpus_path = detail::resolve(base_dir, j.value("corpus", std::string()));
        c.system = j.value("system", std::string());
        if (j.contains("agent")) {
            const auto &a = j.at("agent");
            c.agent.kind = parse_agent_kind(a.value("kind", std::string("toy")));
            c.agent.lexicon_path = detail::resolve(base_dir, a.value("lexicon", std::string()));
            if (a.contains("default_style"))
                c.agent.default_style = parse_toy_style(a.at("default_style").get<std::string>());
            c.agent.command = a.value("command", std::string());
            c.agent.host = a.value("host", c.agent.host);
            c.agent.port = a.value("port", 0);
            c.agent.timeout = std::chrono::milliseconds(a.value("timeout_ms", std::int64_t{30'000}));
        }
        if (j.contains("policy")) {
            const auto &p = j.at("policy");
            c.policy.kind = parse_policy_kind(p.value("kind", std::string("la")));
            c.policy.la_n = p.value("la_n", c.policy.la_n);
            c.policy.k = p.value("k", c.policy.k);
            c.policy.max_output_tokens = p.value("max_output_tokens", c.policy.max_output_tokens);
        }
        c.style = parse_style_tag(j.value("style", std::string("none")));
        if (j.contains("tags")) {
            const auto &t = j.at("tags");
            if (t.contains("si"))
                c.si_tag = detail::tag_from_json(t.at("si"), c.si_tag);
            if (t.contains("off"))
                c.off_tag = detail::tag_from_json(t.at("off"), c.off_tag);
        }
        c.agent.si_tag = c.si_tag;
        c.agent.off_tag = c.off_tag;
        if (j.contains("reference"))
            c.reference = parse_style_tag(j.at("reference").get<std::string>());
        if (j.contains("segment_sizes_ms"))
            c.segment_sizes_ms = j.at("segment_sizes_ms").get<std::vector<Millis>>();
        if (j.contains("rmrep")) {
            c.rmrep.brackets = j.at("rmrep").value("brackets", false);
            c.rmrep.trigram = j.at("rmrep").value("trigram", false);
        }
        c.al_reference_length = j.value("al_reference_length", false);
        c.output_dir = j.value("output_dir", std::string());
        c.seed = j.value("seed", std::uint64_t{0});
        c.jobs = j.value("jobs", std::size_t{1});
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("run config: ") + e.what());
    }
    return c;
}

inline RunConfig load_run_config(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open run config '" + path + "'");
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ConfigError("run config '" + path + "' is not a JSON object");
    return run_config_from_json(j, std::filesystem::path(path).parent_path());
}

} // namespace simulst::eval
