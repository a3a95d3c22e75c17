#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <string_view>
#include <vector>

#include "simulst/core/error.hpp"
#include "simulst/core/types.hpp"

namespace simulst::metrics {

inline constexpr std::size_t kMaxOrder = 4;

// Sufficient statistics of corpus BLEU with one reference per segment.
struct BleuStats {
    std::array<std::size_t, kMaxOrder> matches{};
    std::array<std::size_t, kMaxOrder> totals{};
    std::size_t hyp_len = 0;
    std::size_t ref_len = 0;

    BleuStats &operator+=(const BleuStats &o) {
        for (std::size_t n = 0; n < kMaxOrder; ++n) {
            matches[n] += o.matches[n];
            totals[n] += o.totals[n];
        }
        hyp_len += o.hyp_len;
        ref_len += o.ref_len;
        return *this;
    }
};

namespace detail {

using Ngram = std::vector<std::string_view>;

inline std::map<Ngram, std::size_t> count_ngrams(const Tokens &tokens, std::size_t order) {
    std::map<Ngram, std::size_t> counts;
    for (std::size_t i = 0; i + order <= tokens.size(); ++i)
        ++counts[Ngram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                       tokens.begin() + static_cast<std::ptrdiff_t>(i + order))];
    return counts;
}

} // namespace detail

inline BleuStats sentence_stats(const Tokens &hypothesis, const Tokens &reference) {
    BleuStats s;
    s.hyp_len = hypothesis.size();
    s.ref_len = reference.size();
    for (std::size_t order = 1; order <= kMaxOrder; ++order) {
        const auto hyp = detail::count_ngrams(hypothesis, order);
        const auto ref = detail::count_ngrams(reference, order);
        s.totals[order - 1] = hypothesis.size() >= order ? hypothesis.size() - order + 1 : 0;
        for (const auto &[gram, count] : hyp) {
            if (auto it = ref.find(gram); it != ref.end())
                s.matches[order - 1] += std::min(count, it->second);
        }
    }
    return s;
}

// 0-100. Geometric mean of clipped 1..4-gram precisions times the brevity penalty; 0 when any
// precision is zero or undefined.
inline double bleu_from_stats(const BleuStats &s) {
    if (s.hyp_len == 0)
        return 0.0;
    double log_sum = 0.0;
    for (std::size_t n = 0; n < kMaxOrder; ++n) {
        if (s.totals[n] == 0 || s.matches[n] == 0)
            return 0.0;
        log_sum += std::log(static_cast<double>(s.matches[n]) / static_cast<double>(s.totals[n]));
    }
    const double brevity = s.hyp_len < s.ref_len
                               ? std::exp(1.0 - static_cast<double>(s.ref_len) / static_cast<double>(s.hyp_len))
                               : 1.0;
    return 100.0 * brevity * std::exp(log_sum / static_cast<double>(kMaxOrder));
}

inline double corpus_bleu(const std::vector<Tokens> &hypotheses, const std::vector<Tokens> &references) {
    if (hypotheses.size() != references.size())
        throw DataError("corpus_bleu: " + std::to_string(hypotheses.size()) + " hypotheses vs " +
                        std::to_string(references.size()) + " references");
    if (hypotheses.empty())
        throw DataError("corpus_bleu: empty corpus");
    BleuStats total;
    for (std::size_t i = 0; i < hypotheses.size(); ++i)
        total += sentence_stats(hypotheses[i], references[i]);
    return bleu_from_stats(total);
}

} // namespace simulst::metrics
