#pragma once

#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "simulst/core/corpus_io.hpp"
#include "simulst/core/error.hpp"
#include "simulst/core/types.hpp"
#include "simulst/textproc/tokenize.hpp"

namespace simulst::dataprep {

enum class Origin { kSI, kOffline };
enum class Split { kTrain, kDev, kTest };

inline std::string_view to_string(Origin o) { return o == Origin::kSI ? "si" : "off"; }

inline std::string_view to_string(Split s) {
    switch (s) {
    case Split::kTrain:
        return "train";
    case Split::kDev:
        return "dev";
    case Split::kTest:
        break;
    }
    return "test";
}

inline Origin parse_origin(std::string_view s) {
    if (s == "si")
        return Origin::kSI;
    if (s == "off" || s == "offline")
        return Origin::kOffline;
    throw DataError("unknown origin '" + std::string(s) + "'");
}

inline Split parse_split(std::string_view s) {
    if (s == "train")
        return Split::kTrain;
    if (s == "dev")
        return Split::kDev;
    if (s == "test")
        return Split::kTest;
    throw DataError("unknown split '" + std::string(s) + "'");
}

// One training pair. `source_times[i]` is the end time of source token i in ms, absent where the
// forced alignment failed; an empty vector means the example carries no timing at all.
struct CorpusExample {
    std::string id;
    Tokens source;
    std::vector<std::optional<double>> source_times;
    std::string target;
    Origin origin = Origin::kOffline;
    Split split = Split::kTrain;

    bool operator==(const CorpusExample &) const = default;
};

inline bool is_aligned(const CorpusExample &ex) {
    if (ex.source_times.size() != ex.source.size())
        return false;
    for (const auto &t : ex.source_times)
        if (!t)
            return false;
    return true;
}

// Keeps the examples whose every source token has timing information.
inline std::vector<CorpusExample> filter_unaligned(const std::vector<CorpusExample> &examples) {
    std::vector<CorpusExample> out;
    for (const auto &ex : examples)
        if (is_aligned(ex))
            out.push_back(ex);
    return out;
}

// Token end times of an utterance, segment end times evenly subdivided across each segment's tokens.
inline std::vector<double> token_end_times(const TimedUtterance &utt) {
    std::vector<double> out;
    Millis start = 0;
    for (const auto &seg : utt.segments) {
        const auto m = seg.payload.size();
        for (std::size_t k = 1; k <= m; ++k)
            out.push_back(static_cast<double>(start) +
                          static_cast<double>(seg.duration_ms) * static_cast<double>(k) / static_cast<double>(m));
        start += seg.duration_ms;
    }
    return out;
}

// One example per available reference of a timed utterance.
inline std::vector<CorpusExample> examples_from_utterance(const TimedUtterance &utt, Split split = Split::kTrain) {
    std::vector<CorpusExample> out;
    const auto times = token_end_times(utt);
    std::vector<std::optional<double>> opt_times(times.begin(), times.end());
    const auto add = [&](const std::optional<Tokens> &ref, Origin origin) {
        if (!ref || ref->empty())
            return;
        out.push_back({utt.id, utt.source_prefix(utt.segments.size()), opt_times, textproc::detokenize(*ref),
                       origin, split});
    };
    add(utt.ref_off, Origin::kOffline);
    add(utt.ref_si, Origin::kSI);
    return out;
}

inline nlohmann::json example_to_json(const CorpusExample &ex) {
    nlohmann::json times = nlohmann::json::array();
    for (const auto &t : ex.source_times)
        times.push_back(t ? nlohmann::json(*t) : nlohmann::json(nullptr));
    return {{"id", ex.id},
            {"source", ex.source},
            {"times", std::move(times)},
            {"target", ex.target},
            {"origin", to_string(ex.origin)},
            {"split", to_string(ex.split)}};
}

inline CorpusExample example_from_json(const nlohmann::json &j, const std::string &where = "example") {
    try {
        CorpusExample ex;
        ex.id = j.at("id").get<std::string>();
        ex.source = j.at("source").get<Tokens>();
        if (j.contains("times")) {
            for (const auto &t : j.at("times"))
                ex.source_times.push_back(t.is_null() ? std::nullopt : std::optional<double>(t.get<double>()));
        }
        ex.target = j.at("target").get<std::string>();
        ex.origin = parse_origin(j.at("origin").get<std::string>());
        ex.split = parse_split(j.value("split", std::string("train")));
        if (ex.target.empty())
            throw DataError(where + ": empty target");
        return ex;
    } catch (const nlohmann::json::exception &e) {
        throw DataError(where + ": " + e.what());
    }
}

// Reads examples; lines holding timed utterances (a "segments" key) are expanded with
// examples_from_utterance, taking the split from an optional "split" key.
inline std::vector<CorpusExample> read_examples(std::istream &in, const std::string &name = "examples") {
    std::vector<CorpusExample> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        const std::string where = name + ":" + std::to_string(lineno);
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw DataError(where + ": not a JSON object");
        if (j.contains("segments")) {
            const auto split = parse_split(j.value("split", std::string("train")));
            for (auto &ex : examples_from_utterance(utterance_from_json(j, where), split))
                out.push_back(std::move(ex));
        } else {
            out.push_back(example_from_json(j, where));
        }
    }
    return out;
}

inline std::vector<CorpusExample> read_examples_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open '" + path + "'");
    return read_examples(in, path);
}

inline void write_examples(std::ostream &out, const std::vector<CorpusExample> &examples) {
    for (const auto &ex : examples)
        out << example_to_json(ex).dump() << '\n';
}

} // namespace simulst::dataprep
