#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <string>
#include <string_view>

#include "simulst/core/error.hpp"
#include "simulst/core/types.hpp"

namespace simulst {

enum class PolicyKind { kLocalAgreement, kWaitK };

inline std::string_view to_string(PolicyKind kind) {
    return kind == PolicyKind::kLocalAgreement ? "la" : "wait-k";
}

inline PolicyKind parse_policy_kind(std::string_view name) {
    if (name == "la" || name == "local-agreement" || name == "LocalAgreement")
        return PolicyKind::kLocalAgreement;
    if (name == "wait-k" || name == "waitk" || name == "WaitK")
        return PolicyKind::kWaitK;
    throw ConfigError("unknown policy kind '" + std::string(name) + "' (expected la or wait-k)");
}

struct PolicyConfig {
    PolicyKind kind = PolicyKind::kLocalAgreement;
    std::size_t la_n = 2;
    std::size_t k = 1;
    std::size_t max_output_tokens = 512;

    static PolicyConfig local_agreement(std::size_t n = 2) { return {PolicyKind::kLocalAgreement, n, 1, 512}; }
    static PolicyConfig wait_k(std::size_t k) { return {PolicyKind::kWaitK, 2, k, 512}; }

    void validate() const {
        if (la_n < 2)
            throw ConfigError("la_n must be at least 2, got " + std::to_string(la_n));
        if (k < 1)
            throw ConfigError("k must be at least 1");
        if (max_output_tokens == 0)
            throw ConfigError("max_output_tokens must be positive");
    }

    bool operator==(const PolicyConfig &) const = default;
};

struct PolicyState {
    Tokens committed;
    // Most recent hypotheses, oldest first; at most la_n are kept.
    std::deque<Tokens> history;
    bool prefix_conflict = false;
    std::size_t conflict_count = 0;

    bool operator==(const PolicyState &) const = default;
};

struct PolicyStep {
    Tokens tokens_to_commit;
    PolicyState state;
};

namespace detail {

inline void note_conflict(PolicyState &state, const Tokens &hypothesis) {
    state.prefix_conflict = !is_prefix_of(state.committed, hypothesis);
    if (state.prefix_conflict)
        ++state.conflict_count;
}

inline Tokens commit_range(PolicyState &state, const Tokens &source, std::size_t end) {
    Tokens out(source.begin() + static_cast<std::ptrdiff_t>(state.committed.size()),
               source.begin() + static_cast<std::ptrdiff_t>(end));
    state.committed.insert(state.committed.end(), out.begin(), out.end());
    return out;
}

} // namespace detail

// Local Agreement: commit the longest common prefix of the last la_n hypotheses beyond what is
// already committed. Nothing is committed until la_n hypotheses exist, and committed tokens are never
// retracted; a hypothesis that does not extend the committed output sets prefix_conflict.
inline PolicyStep la_step(const PolicyConfig &config, PolicyState state, const Hypothesis &hypothesis) {
    state.history.push_back(hypothesis.tokens);
    while (state.history.size() > config.la_n)
        state.history.pop_front();
    detail::note_conflict(state, hypothesis.tokens);

    if (state.history.size() < config.la_n)
        return {{}, std::move(state)};

    std::size_t agreed = state.history.back().size();
    for (const auto &h : state.history)
        agreed = std::min(agreed, common_prefix_length(h, state.history.back()));

    const Tokens &latest = state.history.back();
    if (agreed <= state.committed.size() || !is_prefix_of(state.committed, latest))
        return {{}, std::move(state)};
    Tokens out = detail::commit_range(state, latest, agreed);
    return {std::move(out), std::move(state)};
}

// wait-k on the segment clock: nothing before k segments are read, then one token per step.
inline PolicyStep wait_k_step(const PolicyConfig &config, PolicyState state, std::size_t segments_read,
                              const Hypothesis &hypothesis) {
    detail::note_conflict(state, hypothesis.tokens);
    if (segments_read < config.k || state.prefix_conflict ||
        hypothesis.tokens.size() <= state.committed.size())
        return {{}, std::move(state)};
    Tokens out = detail::commit_range(state, hypothesis.tokens, state.committed.size() + 1);
    return {std::move(out), std::move(state)};
}

// End of source: commit whatever the final hypothesis holds beyond the committed prefix. A final
// hypothesis that contradicts the committed output adds nothing.
inline PolicyStep flush_step(PolicyState state, const Hypothesis &hypothesis) {
    detail::note_conflict(state, hypothesis.tokens);
    if (state.prefix_conflict)
        return {{}, std::move(state)};
    Tokens out = detail::commit_range(state, hypothesis.tokens, hypothesis.tokens.size());
    return {std::move(out), std::move(state)};
}

inline PolicyStep policy_step(const PolicyConfig &config, PolicyState state, std::size_t segments_read,
                              const Hypothesis &hypothesis) {
    if (config.kind == PolicyKind::kLocalAgreement)
        return la_step(config, std::move(state), hypothesis);
    return wait_k_step(config, std::move(state), segments_read, hypothesis);
}

} // namespace simulst
