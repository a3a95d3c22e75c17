#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "simulst/agents/agent.hpp"
#include "simulst/agents/toy.hpp"
#include "simulst/core/types.hpp"

namespace testing_support {

using namespace simulst;

inline std::string fixture(const std::string &name) { return std::string(SIMULST_FIXTURES) + "/" + name; }
inline std::string golden(const std::string &name) { return std::string(SIMULST_GOLDEN) + "/" + name; }

// One segment per entry, all with the same duration.
inline TimedUtterance make_utterance(const std::string &id, const std::vector<Tokens> &payloads,
                                     Millis duration_ms) {
    TimedUtterance u;
    u.id = id;
    for (std::size_t i = 0; i < payloads.size(); ++i)
        u.segments.push_back({i, duration_ms, payloads[i]});
    return u;
}

// Returns the source prefix unchanged (after the forced and committed prefixes).
class EchoAgent : public Agent {
  public:
    Tokens hypothesize(const AgentRequest &request) override {
        Tokens out = request.forced_prefix;
        const auto body = continue_from(request.committed, request.source_prefix);
        out.insert(out.end(), body.begin(), body.end());
        return out;
    }
};

// Answers with a fixed script of hypotheses, one per call, ignoring the committed constraint.
class ScriptedAgent : public Agent {
  public:
    explicit ScriptedAgent(std::vector<Tokens> script) : script_(std::move(script)) {}

    Tokens hypothesize(const AgentRequest &request) override {
        Tokens out = request.forced_prefix;
        const auto &h = script_.at(std::min(calls_, script_.size() - 1));
        ++calls_;
        requests.push_back(request);
        out.insert(out.end(), h.begin(), h.end());
        return out;
    }

    void reset() override { calls_ = 0; }

    std::vector<AgentRequest> requests;

  private:
    std::vector<Tokens> script_;
    std::size_t calls_ = 0;
};

// Small lexicon matching the running example.
inline ToyLexicon pen_lexicon() {
    ToyLexicon lex;
    lex.entries = {{"I", "watashi-wa"}, {"bought", "katta"}, {"a", ""}, {"pen", "pen-o"},
                   {"very", "totemo"}, {"new", "atarashii"}, {".", "。"}, {"and", "soshite"}};
    lex.function_words = {"a", "very"};
    lex.verbs = {"bought"};
    lex.clause_breaks = {".", "and"};
    lex.reorder_window = 3;
    return lex;
}

// Random lexicon over a vocabulary of `words` source words w0..w{n-1}.
inline ToyLexicon random_lexicon(std::mt19937_64 &rng, std::size_t words) {
    ToyLexicon lex;
    std::uniform_int_distribution<int> kind(0, 9);
    for (std::size_t i = 0; i < words; ++i) {
        const std::string src = "w" + std::to_string(i);
        const int k = kind(rng);
        lex.entries[src] = k == 0 ? std::string() : "t" + std::to_string(i);
        if (k == 1 || k == 2)
            lex.function_words.insert(src);
        else if (k == 3 || k == 4)
            lex.verbs.insert(src);
        else if (k == 5)
            lex.clause_breaks.insert(src);
    }
    lex.reorder_window = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    return lex;
}

inline TimedUtterance random_utterance(std::mt19937_64 &rng, std::size_t words, const std::string &id) {
    std::uniform_int_distribution<std::size_t> nseg(1, 8);
    std::uniform_int_distribution<std::size_t> ntok(0, 3);
    std::uniform_int_distribution<std::size_t> word(0, words - 1);
    std::uniform_int_distribution<Millis> dur(50, 600);
    TimedUtterance u;
    u.id = id;
    const auto n = nseg(rng);
    for (std::size_t i = 0; i < n; ++i) {
        TimedSegment s{i, dur(rng), {}};
        const auto m = ntok(rng);
        for (std::size_t k = 0; k < m; ++k)
            s.payload.push_back("w" + std::to_string(word(rng)));
        u.segments.push_back(std::move(s));
    }
    return u;
}

// Committed output after every Read, taken from the log.
inline std::vector<Tokens> committed_after_reads(const SessionLog &log) {
    std::vector<Tokens> out;
    Tokens committed;
    bool seen_read = false;
    for (const auto &ev : log.events) {
        if (std::holds_alternative<ReadEvent>(ev)) {
            if (seen_read)
                out.push_back(committed);
            seen_read = true;
        } else {
            committed.push_back(std::get<WriteEvent>(ev).token);
        }
    }
    out.push_back(committed);
    return out;
}

} // namespace testing_support
