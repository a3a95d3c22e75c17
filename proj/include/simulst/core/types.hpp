#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "simulst/core/error.hpp"

namespace simulst {

using Token = std::string;
using Tokens = std::vector<Token>;

// Milliseconds on the simulated source clock.
using Millis = std::int64_t;

struct TimedSegment {
    std::size_t index = 0;
    Millis duration_ms = 0;
    Tokens payload;

    bool operator==(const TimedSegment &) const = default;
};

struct TimedUtterance {
    std::string id;
    std::vector<TimedSegment> segments;
    std::optional<Tokens> ref_si;
    std::optional<Tokens> ref_off;

    Millis total_duration_ms() const {
        Millis total = 0;
        for (const auto &seg : segments)
            total += seg.duration_ms;
        return total;
    }

    std::size_t source_token_count() const {
        std::size_t n = 0;
        for (const auto &seg : segments)
            n += seg.payload.size();
        return n;
    }

    // Source tokens of segments [0, count).
    Tokens source_prefix(std::size_t count) const {
        Tokens out;
        for (std::size_t i = 0; i < count && i < segments.size(); ++i)
            out.insert(out.end(), segments[i].payload.begin(), segments[i].payload.end());
        return out;
    }

    bool operator==(const TimedUtterance &) const = default;
};

// Throws DataError naming the utterance when an invariant does not hold.
inline void validate(const TimedUtterance &utt) {
    if (utt.segments.empty())
        throw DataError("utterance '" + utt.id + "' has no segments");
    for (std::size_t i = 0; i < utt.segments.size(); ++i) {
        const auto &seg = utt.segments[i];
        if (seg.index != i)
            throw DataError("utterance '" + utt.id + "': segment indices are not contiguous at position " +
                            std::to_string(i));
        if (seg.duration_ms <= 0)
            throw DataError("utterance '" + utt.id + "': segment " + std::to_string(i) +
                            " has non-positive duration");
    }
}

struct ReadEvent {
    std::size_t segment_index = 0;
    Millis end_time_ms = 0;
    // Source tokens carried by the segment; latency metrics need them to place input tokens in time.
    std::size_t source_tokens = 0;

    bool operator==(const ReadEvent &) const = default;
};

struct WriteEvent {
    Token token;
    Millis emit_time_ms = 0;

    bool operator==(const WriteEvent &) const = default;
};

using Event = std::variant<ReadEvent, WriteEvent>;

struct SessionLog {
    std::vector<Event> events;
    Millis source_total_ms = 0;
    bool finished = false;
    // Policy steps at which the agent's hypothesis no longer extended the committed output.
    std::size_t prefix_conflicts = 0;

    Tokens committed() const {
        Tokens out;
        for (const auto &ev : events)
            if (const auto *w = std::get_if<WriteEvent>(&ev))
                out.push_back(w->token);
        return out;
    }

    std::size_t write_count() const {
        std::size_t n = 0;
        for (const auto &ev : events)
            n += std::holds_alternative<WriteEvent>(ev) ? 1 : 0;
        return n;
    }

    bool operator==(const SessionLog &) const = default;
};

struct Hypothesis {
    Tokens tokens;
    std::size_t segments_consumed = 0;

    bool operator==(const Hypothesis &) const = default;
};

// Longest common prefix length of two token sequences.
inline std::size_t common_prefix_length(const Tokens &a, const Tokens &b) {
    std::size_t n = 0;
    while (n < a.size() && n < b.size() && a[n] == b[n])
        ++n;
    return n;
}

inline bool is_prefix_of(const Tokens &prefix, const Tokens &seq) {
    return prefix.size() <= seq.size() && common_prefix_length(prefix, seq) == prefix.size();
}

// Checks the timing invariants of a log produced for `utt`. Returns an empty string when valid,
// otherwise a description of the first violation.
inline std::string check_log_invariants(const SessionLog &log, const TimedUtterance &utt) {
    Millis last_time = 0;
    Millis cumulative = 0;
    std::size_t next_read = 0;
    std::optional<Millis> latest_read;
    for (std::size_t e = 0; e < log.events.size(); ++e) {
        const auto &ev = log.events[e];
        const std::string where = "event " + std::to_string(e) + ": ";
        if (const auto *r = std::get_if<ReadEvent>(&ev)) {
            if (r->segment_index != next_read)
                return where + "read out of segment order";
            if (next_read >= utt.segments.size())
                return where + "read past the last segment";
            cumulative += utt.segments[next_read].duration_ms;
            if (r->end_time_ms != cumulative)
                return where + "read end time is not the cumulative duration";
            if (r->end_time_ms < last_time)
                return where + "timestamps decrease";
            last_time = r->end_time_ms;
            latest_read = r->end_time_ms;
            ++next_read;
        } else {
            const auto &w = std::get<WriteEvent>(ev);
            const Millis expected = next_read == utt.segments.size() ? log.source_total_ms
                                                                      : latest_read.value_or(-1);
            if (w.emit_time_ms != expected)
                return where + "write time does not match the latest read";
            if (w.emit_time_ms < last_time)
                return where + "timestamps decrease";
            last_time = w.emit_time_ms;
        }
    }
    if (log.source_total_ms != utt.total_duration_ms())
        return "source_total_ms does not match the utterance duration";
    if (last_time > log.source_total_ms)
        return "event time exceeds source_total_ms";
    return {};
}

} // namespace simulst
