#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "simulst/core/error.hpp"
#include "simulst/core/types.hpp"
#include "simulst/textproc/tokenize.hpp"

namespace simulst::metrics {

// Character-based: total hypothesis characters over total reference characters, whitespace excluded.
inline double length_ratio(const std::vector<std::string> &hypotheses, const std::vector<std::string> &references) {
    if (hypotheses.empty() || references.empty())
        throw DataError("length_ratio: empty corpus");
    if (hypotheses.size() != references.size())
        throw DataError("length_ratio: hypothesis and reference counts differ");
    std::size_t hyp = 0;
    std::size_t ref = 0;
    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
        hyp += textproc::char_count(hypotheses[i]);
        ref += textproc::char_count(references[i]);
    }
    if (ref == 0)
        throw DataError("length_ratio: references have zero length");
    return static_cast<double>(hyp) / static_cast<double>(ref);
}

inline double length_ratio(const std::vector<Tokens> &hypotheses, const std::vector<Tokens> &references) {
    std::vector<std::string> h;
    std::vector<std::string> r;
    for (const auto &t : hypotheses)
        h.push_back(textproc::detokenize(t));
    for (const auto &t : references)
        r.push_back(textproc::detokenize(t));
    return length_ratio(h, r);
}

// Bucketed counts of per-sentence (hyp_chars - ref_chars). Differences are clamped into
// [lower, upper]; bucket i covers [lower + i*width, lower + (i+1)*width) and the last bucket also
// holds `upper`.
struct LengthHistogram {
    std::int64_t width = 5;
    std::int64_t lower = -50;
    std::int64_t upper = 50;
    std::vector<std::size_t> counts;

    std::size_t bucket_count() const { return static_cast<std::size_t>((upper - lower + width - 1) / width); }
    std::int64_t bucket_lower(std::size_t i) const { return lower + static_cast<std::int64_t>(i) * width; }

    void add(std::int64_t diff) {
        if (counts.empty())
            counts.assign(bucket_count(), 0);
        diff = std::clamp(diff, lower, upper);
        auto idx = static_cast<std::size_t>((diff - lower) / width);
        if (idx >= counts.size())
            idx = counts.size() - 1;
        ++counts[idx];
    }

    bool operator==(const LengthHistogram &) const = default;
};

inline LengthHistogram length_difference_histogram(const std::vector<std::string> &hypotheses,
                                                   const std::vector<std::string> &references,
                                                   std::int64_t width = 5, std::int64_t lower = -50,
                                                   std::int64_t upper = 50) {
    if (hypotheses.size() != references.size())
        throw DataError("length histogram: hypothesis and reference counts differ");
    if (width <= 0 || upper <= lower)
        throw ConfigError("length histogram: invalid bucket layout");
    LengthHistogram h{width, lower, upper, {}};
    h.counts.assign(h.bucket_count(), 0);
    for (std::size_t i = 0; i < hypotheses.size(); ++i)
        h.add(static_cast<std::int64_t>(textproc::char_count(hypotheses[i])) -
              static_cast<std::int64_t>(textproc::char_count(references[i])));
    return h;
}

} // namespace simulst::metrics
