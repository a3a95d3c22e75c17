#pragma once

#include <string>

#include "simulst/agents/agent.hpp"
#include "simulst/core/error.hpp"
#include "simulst/core/types.hpp"
#include "simulst/policies/policy.hpp"
#include "simulst/policies/style.hpp"

namespace simulst {

// Replays the utterance segment by segment. After each Read the agent is asked for a full hypothesis
// of the source read so far; the policy decides which tokens to commit, and each committed token is
// logged as a Write stamped with the latest Read time. After the last segment the remaining
// hypothesis is flushed. Computation time is not simulated.
inline SessionLog run_session(const TimedUtterance &utterance, const PolicyConfig &policy, Agent &agent,
                              const StyleTagChoice &style) {
    validate(utterance);
    policy.validate();
    style.validate();

    SessionLog log;
    log.source_total_ms = utterance.total_duration_ms();

    try {
        agent.reset();
    } catch (const AgentError &e) {
        throw SessionError("utterance '" + utterance.id + "': agent reset failed: " + e.what(), 0);
    }

    PolicyState state;
    Millis clock = 0;
    Tokens source;
    const std::size_t n = utterance.segments.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto &seg = utterance.segments[i];
        clock += seg.duration_ms;
        source.insert(source.end(), seg.payload.begin(), seg.payload.end());
        log.events.emplace_back(ReadEvent{i, clock, seg.payload.size()});

        const auto request = apply_forced_prefix({source, {}, state.committed}, style);
        Hypothesis hypothesis{{}, i + 1};
        try {
            hypothesis.tokens = strip_forced_prefix(agent.hypothesize(request), request.forced_prefix);
        } catch (const AgentError &e) {
            throw SessionError("utterance '" + utterance.id + "', segment " + std::to_string(i) + ": " + e.what(),
                               i);
        }

        auto step = i + 1 == n ? flush_step(std::move(state), hypothesis)
                               : policy_step(policy, std::move(state), i + 1, hypothesis);
        state = std::move(step.state);
        if (state.committed.size() > policy.max_output_tokens)
            throw SessionError("utterance '" + utterance.id + "', segment " + std::to_string(i) +
                                   ": output exceeded max_output_tokens=" + std::to_string(policy.max_output_tokens),
                               i);
        for (auto &tok : step.tokens_to_commit)
            log.events.emplace_back(WriteEvent{std::move(tok), clock});
    }
    log.finished = true;
    log.prefix_conflicts = state.conflict_count;
    return log;
}

} // namespace simulst
