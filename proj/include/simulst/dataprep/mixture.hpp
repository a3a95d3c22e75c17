#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "simulst/core/error.hpp"
#include "simulst/dataprep/examples.hpp"
#include "simulst/textproc/tags.hpp"
#include "simulst/textproc/tokenize.hpp"

namespace simulst::dataprep {

enum class Condition { kOfflineFT, kSIFT, kMixedFT, kMixedFTStyle, kMixedFTStyleUp };

inline std::string_view to_string(Condition c) {
    switch (c) {
    case Condition::kOfflineFT:
        return "offline_ft";
    case Condition::kSIFT:
        return "si_ft";
    case Condition::kMixedFT:
        return "mixed_ft";
    case Condition::kMixedFTStyle:
        return "mixed_ft_style";
    case Condition::kMixedFTStyleUp:
        break;
    }
    return "mixed_ft_style_up";
}

inline Condition parse_condition(std::string_view s) {
    for (auto c : {Condition::kOfflineFT, Condition::kSIFT, Condition::kMixedFT, Condition::kMixedFTStyle,
                   Condition::kMixedFTStyleUp})
        if (s == to_string(c))
            return c;
    throw ConfigError("unknown mixture condition '" + std::string(s) +
                      "' (expected offline_ft, si_ft, mixed_ft, mixed_ft_style or mixed_ft_style_up)");
}

struct MixtureConfig {
    Condition condition = Condition::kMixedFTStyle;
    std::size_t upsample_factor = 1;
    std::uint64_t seed = 0;
    textproc::TagSpec si_tag = textproc::si_tag();
    textproc::TagSpec off_tag = textproc::off_tag();

    void validate() const {
        if (upsample_factor < 1)
            throw ConfigError("upsample_factor must be at least 1");
    }
};

// Integer factor that brings the SI portion closest to the offline portion's size.
inline std::size_t balanced_upsample_factor(std::size_t offline_count, std::size_t si_count) {
    if (si_count == 0)
        throw DataError("cannot balance against an empty SI portion");
    const auto f = static_cast<std::size_t>(std::llround(static_cast<double>(offline_count) / static_cast<double>(si_count)));
    return f == 0 ? 1 : f;
}

struct MixtureManifest {
    Condition condition = Condition::kMixedFTStyle;
    std::size_t upsample_factor = 1;
    std::uint64_t seed = 0;
    std::size_t offline_examples = 0;
    std::size_t si_examples = 0;
    std::size_t offline_lines = 0;
    std::size_t si_lines = 0;
    std::size_t total_lines = 0;

    bool operator==(const MixtureManifest &) const = default;
};

inline nlohmann::json manifest_to_json(const MixtureManifest &m) {
    return {{"condition", to_string(m.condition)},
            {"upsample_factor", m.upsample_factor},
            {"seed", m.seed},
            {"offline_examples", m.offline_examples},
            {"si_examples", m.si_examples},
            {"offline_lines", m.offline_lines},
            {"si_lines", m.si_lines},
            {"total_lines", m.total_lines}};
}

struct Mixture {
    // "source<TAB>target" per line, without the newline.
    std::vector<std::string> lines;
    MixtureManifest manifest;
};

// Seeded Fisher-Yates permutation of [0, n). Uses raw engine output with rejection sampling so the
// order does not depend on the standard library's distribution implementation.
inline std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const std::uint64_t bound = i;
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
        std::uint64_t draw = 0;
        do {
            draw = rng();
        } while (draw >= limit);
        std::swap(perm[i - 1], perm[static_cast<std::size_t>(draw % bound)]);
    }
    return perm;
}

namespace detail {

inline std::string sanitize_field(std::string_view s) {
    std::string out(s);
    for (auto &c : out)
        if (c == '\t' || c == '\n' || c == '\r')
            c = ' ';
    return out;
}

} // namespace detail

inline std::string training_line(const CorpusExample &ex, const textproc::TagSpec *tag) {
    const auto target = detail::sanitize_field(ex.target);
    return detail::sanitize_field(textproc::join(ex.source)) + "\t" +
           (tag ? textproc::prepend_tag(target, *tag) : target);
}

// Builds the training lines for one fine-tuning condition:
//   offline_ft         offline examples, untagged
//   si_ft              SI examples, untagged
//   mixed_ft           both, untagged
//   mixed_ft_style     both, each target prefixed with its origin's tag
//   mixed_ft_style_up  as mixed_ft_style with every SI example repeated upsample_factor times
// The result is shuffled with a seeded permutation.
inline Mixture build_mixture(const std::vector<CorpusExample> &examples, const MixtureConfig &config) {
    config.validate();
    const bool wants_offline = config.condition != Condition::kSIFT;
    const bool wants_si = config.condition != Condition::kOfflineFT;
    const bool tagged = config.condition == Condition::kMixedFTStyle || config.condition == Condition::kMixedFTStyleUp;
    const std::size_t repeat = config.condition == Condition::kMixedFTStyleUp ? config.upsample_factor : 1;

    Mixture mix;
    auto &m = mix.manifest;
    m.condition = config.condition;
    m.upsample_factor = config.upsample_factor;
    m.seed = config.seed;
    for (const auto &ex : examples)
        (ex.origin == Origin::kSI ? m.si_examples : m.offline_examples) += 1;
    if (wants_offline && m.offline_examples == 0)
        throw DataError("condition " + std::string(to_string(config.condition)) + " needs offline examples, none given");
    if (wants_si && m.si_examples == 0)
        throw DataError("condition " + std::string(to_string(config.condition)) + " needs SI examples, none given");

    std::vector<std::string> ordered;
    ordered.reserve((wants_offline ? m.offline_examples : 0) + (wants_si ? m.si_examples * repeat : 0));
    for (const auto &ex : examples) {
        if (ex.origin == Origin::kOffline && wants_offline) {
            ordered.push_back(training_line(ex, tagged ? &config.off_tag : nullptr));
            ++m.offline_lines;
        } else if (ex.origin == Origin::kSI && wants_si) {
            const auto line = training_line(ex, tagged ? &config.si_tag : nullptr);
            for (std::size_t r = 0; r < repeat; ++r)
                ordered.push_back(line);
            m.si_lines += repeat;
        }
    }
    m.total_lines = ordered.size();

    const auto perm = seeded_permutation(ordered.size(), config.seed);
    mix.lines.reserve(ordered.size());
    for (auto idx : perm)
        mix.lines.push_back(std::move(ordered[idx]));
    return mix;
}

// Origin recovered from a training line's target tag; nullopt for untagged lines.
inline std::optional<Origin> tagged_origin(std::string_view line, const textproc::TagSpec &si,
                                           const textproc::TagSpec &off) {
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos)
        throw DataError("training line has no tab separator");
    const auto target = line.substr(tab + 1);
    if (textproc::has_tag(target, si))
        return Origin::kSI;
    if (textproc::has_tag(target, off))
        return Origin::kOffline;
    return std::nullopt;
}

} // namespace simulst::dataprep
