#pragma once

#include "simulst/core/types.hpp"
#include "simulst/policies/style.hpp"

namespace simulst {

// A translation agent produces a full hypothesis for a source prefix. The answer begins with the
// request's forced prefix followed by its committed tokens.
class Agent {
  public:
    virtual ~Agent() = default;

    virtual Tokens hypothesize(const AgentRequest &request) = 0;

    // Clears per-utterance state before a new session.
    virtual void reset() {}
};

} // namespace simulst
