#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "simulst/core/types.hpp"

namespace simulst::metrics {

// Average Lagging over explicit delays: d[i] is the source amount consumed when output token i+1 was
// written, `source_total` the full source amount and `rate_length` the target length that defines the
// ideal diagonal. tau is the first token written once the whole source was consumed (or the last
// token). Negative values are returned as-is.
inline double average_lagging(std::span<const double> delays, double source_total, double rate_length) {
    if (delays.empty())
        throw std::invalid_argument("average_lagging: no output tokens");
    if (!(rate_length > 0))
        throw std::invalid_argument("average_lagging: rate length must be positive");
    std::size_t tau = delays.size();
    for (std::size_t i = 0; i < delays.size(); ++i) {
        if (delays[i] >= source_total) {
            tau = i + 1;
            break;
        }
    }
    const double step = source_total / rate_length;
    double sum = 0.0;
    for (std::size_t i = 0; i < tau; ++i)
        sum += delays[i] - static_cast<double>(i) * step;
    return sum / static_cast<double>(tau);
}

// Per output token: emission time and the number of source tokens read by then.
struct WriteTiming {
    Millis emit_time_ms;
    std::size_t tokens_read;
};

struct SourceTiming {
    // End time of every source token, segment end times evenly subdivided over the segment's tokens.
    std::vector<double> token_end_ms;
    std::vector<WriteTiming> writes;
    std::size_t total_tokens = 0;
};

inline SourceTiming source_timing(const SessionLog &log) {
    SourceTiming t;
    Millis segment_start = 0;
    for (const auto &ev : log.events) {
        if (const auto *r = std::get_if<ReadEvent>(&ev)) {
            const double span = static_cast<double>(r->end_time_ms - segment_start);
            for (std::size_t k = 1; k <= r->source_tokens; ++k)
                t.token_end_ms.push_back(static_cast<double>(segment_start) +
                                         span * static_cast<double>(k) / static_cast<double>(r->source_tokens));
            t.total_tokens += r->source_tokens;
            segment_start = r->end_time_ms;
        } else {
            t.writes.push_back({std::get<WriteEvent>(ev).emit_time_ms, t.total_tokens});
        }
    }
    return t;
}

// AL in milliseconds. The ideal rate uses the hypothesis length, or `reference_length` when given.
// nullopt when nothing was written.
inline std::optional<double> average_lagging(const SessionLog &log,
                                             std::optional<std::size_t> reference_length = std::nullopt) {
    std::vector<double> delays;
    for (const auto &ev : log.events)
        if (const auto *w = std::get_if<WriteEvent>(&ev))
            delays.push_back(static_cast<double>(w->emit_time_ms));
    if (delays.empty())
        return std::nullopt;
    if (reference_length && *reference_length == 0)
        throw std::invalid_argument("average_lagging: reference length must be positive");
    const double rate = static_cast<double>(reference_length.value_or(delays.size()));
    return average_lagging(delays, static_cast<double>(log.source_total_ms), rate);
}

// AL on the source-token clock: a token's delay is the number of source tokens read when it was written.
inline std::optional<double> average_lagging_tokens(const SessionLog &log,
                                                    std::optional<std::size_t> reference_length = std::nullopt) {
    const auto timing = source_timing(log);
    if (timing.writes.empty() || timing.total_tokens == 0)
        return std::nullopt;
    if (reference_length && *reference_length == 0)
        throw std::invalid_argument("average_lagging_tokens: reference length must be positive");
    std::vector<double> delays;
    for (const auto &w : timing.writes)
        delays.push_back(static_cast<double>(w.tokens_read));
    const double rate = static_cast<double>(reference_length.value_or(delays.size()));
    return average_lagging(delays, static_cast<double>(timing.total_tokens), rate);
}

// Average Token Delay: mean over output tokens y_j of T_out(y_j) - T_in(x_a(j)), with
// a(j) = min(j, r(j)) and r(j) the source tokens read when y_j was written. When no source token has
// been read yet, T_in is the stream start (0 ms). nullopt when nothing was written.
inline std::optional<double> average_token_delay(const SessionLog &log) {
    const auto timing = source_timing(log);
    if (timing.writes.empty())
        return std::nullopt;
    double sum = 0.0;
    for (std::size_t j = 1; j <= timing.writes.size(); ++j) {
        const auto &w = timing.writes[j - 1];
        const std::size_t a = std::min(j, w.tokens_read);
        const double t_in = a == 0 ? 0.0 : timing.token_end_ms[a - 1];
        sum += static_cast<double>(w.emit_time_ms) - t_in;
    }
    return sum / static_cast<double>(timing.writes.size());
}

struct SentenceLatency {
    std::string id;
    std::optional<double> al_ms;
    std::optional<double> al_tokens;
    std::optional<double> atd_ms;

    bool operator==(const SentenceLatency &) const = default;
};

struct LatencyReport {
    std::optional<double> al_ms;
    std::optional<double> al_tokens;
    std::optional<double> atd_ms;
    std::vector<SentenceLatency> per_sentence;
};

inline std::optional<double> mean_of_present(const std::vector<SentenceLatency> &rows,
                                             std::optional<double> SentenceLatency::*field) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto &r : rows) {
        if (const auto &v = r.*field) {
            sum += *v;
            ++n;
        }
    }
    if (n == 0)
        return std::nullopt;
    return sum / static_cast<double>(n);
}

// Corpus latency: unweighted means of the sentence values that are defined.
inline LatencyReport summarize_latency(std::vector<SentenceLatency> per_sentence) {
    LatencyReport r;
    r.al_ms = mean_of_present(per_sentence, &SentenceLatency::al_ms);
    r.al_tokens = mean_of_present(per_sentence, &SentenceLatency::al_tokens);
    r.atd_ms = mean_of_present(per_sentence, &SentenceLatency::atd_ms);
    r.per_sentence = std::move(per_sentence);
    return r;
}

} // namespace simulst::metrics
