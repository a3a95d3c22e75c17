#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "simulst/agents/agent.hpp"
#include "simulst/core/error.hpp"
#include "simulst/core/types.hpp"
#include "simulst/dataprep/examples.hpp"
#include "simulst/policies/style.hpp"
#include "simulst/textproc/tokenize.hpp"

namespace simulst::dataprep {

struct PrefixPair {
    std::size_t segments = 0; // source prefix = segments [0, segments)
    Tokens source_prefix;
    Tokens target_prefix;

    bool operator==(const PrefixPair &) const = default;
};

// Prefix-to-prefix pairs from an offline model's intermediate outputs. For every source prefix
// p_i = segments[0..i] the agent's full hypothesis t_i is truncated to its agreement with the
// full-sentence translation t_K, giving the pair (p_i, lcp(t_i, t_K)). Pairs whose target is empty
// or does not grow past the previously emitted target are skipped. Agent failures propagate.
inline std::vector<PrefixPair> extract_prefix_pairs(const TimedUtterance &utterance, Agent &agent,
                                                    const StyleTagChoice &style) {
    validate(utterance);
    style.validate();
    agent.reset();
    const std::size_t k = utterance.segments.size();
    std::vector<Tokens> hyps;
    hyps.reserve(k);
    for (std::size_t i = 1; i <= k; ++i) {
        const auto request = apply_forced_prefix({utterance.source_prefix(i), {}, {}}, style);
        hyps.push_back(strip_forced_prefix(agent.hypothesize(request), request.forced_prefix));
    }
    const Tokens &full = hyps.back();
    std::vector<PrefixPair> pairs;
    std::size_t emitted = 0;
    for (std::size_t i = 1; i <= k; ++i) {
        const std::size_t agree = common_prefix_length(hyps[i - 1], full);
        if (agree == 0 || agree <= emitted)
            continue;
        pairs.push_back({i, utterance.source_prefix(i), Tokens(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(agree))});
        emitted = agree;
    }
    return pairs;
}

inline std::vector<CorpusExample> pairs_to_examples(const TimedUtterance &utterance,
                                                    const std::vector<PrefixPair> &pairs, Origin origin,
                                                    Split split = Split::kTrain) {
    const auto times = token_end_times(utterance);
    std::vector<CorpusExample> out;
    for (const auto &p : pairs) {
        CorpusExample ex;
        ex.id = utterance.id + "#" + std::to_string(p.segments);
        ex.source = p.source_prefix;
        for (std::size_t i = 0; i < p.source_prefix.size(); ++i)
            ex.source_times.emplace_back(times[i]);
        ex.target = textproc::detokenize(p.target_prefix);
        ex.origin = origin;
        ex.split = split;
        out.push_back(std::move(ex));
    }
    return out;
}

struct ExtractionFailure {
    std::string utterance_id;
    Origin origin;
    std::string message;
};

struct ExtractionResult {
    std::vector<CorpusExample> examples;
    std::vector<ExtractionFailure> failures;
};

using AgentFactory = std::function<std::unique_ptr<Agent>()>;

// Per-origin extraction settings: an utterance yields pairs for each origin whose reference is
// present, using that origin's agent and style (SI pairs with the SI-tuned model, offline pairs with
// the offline model).
struct OriginExtraction {
    Origin origin;
    AgentFactory make_agent;
    StyleTagChoice style;
};

// Runs extraction over a corpus with up to `jobs` workers, each owning its own agents. Output is
// ordered by utterance id, then origin (offline before SI), then prefix length. A failing utterance
// contributes nothing for that origin and is reported in `failures`.
inline ExtractionResult extract_corpus(const std::vector<TimedUtterance> &corpus,
                                       const std::vector<OriginExtraction> &origins, std::size_t jobs = 1) {
    struct Slot {
        std::vector<CorpusExample> examples;
        std::vector<ExtractionFailure> failures;
    };
    std::vector<Slot> slots(corpus.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr setup_error;
    const auto worker = [&] {
        std::vector<std::unique_ptr<Agent>> agents;
        try {
            for (const auto &o : origins)
                agents.push_back(o.make_agent());
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!setup_error)
                setup_error = std::current_exception();
            return;
        }
        for (std::size_t u = next++; u < corpus.size(); u = next++) {
            const auto &utt = corpus[u];
            for (std::size_t o = 0; o < origins.size(); ++o) {
                const auto &ref = origins[o].origin == Origin::kSI ? utt.ref_si : utt.ref_off;
                if (!ref)
                    continue;
                try {
                    const auto pairs = extract_prefix_pairs(utt, *agents[o], origins[o].style);
                    auto ex = pairs_to_examples(utt, pairs, origins[o].origin);
                    slots[u].examples.insert(slots[u].examples.end(), ex.begin(), ex.end());
                } catch (const Error &e) {
                    slots[u].failures.push_back({utt.id, origins[o].origin, e.what()});
                }
            }
        }
    };
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(corpus.size(), 1));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < jobs; ++j)
            pool.emplace_back(worker);
    }
    if (setup_error)
        std::rethrow_exception(setup_error);

    std::vector<std::size_t> order(corpus.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return corpus[a].id < corpus[b].id; });
    ExtractionResult result;
    for (auto u : order) {
        auto &slot = slots[u];
        std::stable_sort(slot.examples.begin(), slot.examples.end(),
                         [](const CorpusExample &a, const CorpusExample &b) {
                             return a.origin == Origin::kOffline && b.origin == Origin::kSI;
                         });
        result.examples.insert(result.examples.end(), slot.examples.begin(), slot.examples.end());
        result.failures.insert(result.failures.end(), slot.failures.begin(), slot.failures.end());
    }
    return result;
}

} // namespace simulst::dataprep
