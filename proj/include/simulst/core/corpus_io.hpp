#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "simulst/core/error.hpp"
#include "simulst/core/types.hpp"
#include "simulst/textproc/tokenize.hpp"

namespace simulst {

// Corpus file: one JSON object per line,
//   {"id": "...", "segments": [{"duration_ms": 320, "tokens": ["I"]}, ...],
//    "ref_si": [...], "ref_off": [...]}
// References may be given as token arrays or as plain strings (tokenized with the built-in
// tokenizer). Unknown keys are ignored.

namespace detail {

inline Tokens tokens_field(const nlohmann::json &j, const char *field, const std::string &where) {
    const auto &v = j.at(field);
    if (v.is_string())
        return textproc::tokenize(v.get<std::string>());
    if (!v.is_array())
        throw DataError(where + ": '" + field + "' must be a string or an array of strings");
    Tokens out;
    for (const auto &t : v) {
        if (!t.is_string())
            throw DataError(where + ": '" + field + "' must contain only strings");
        out.push_back(t.get<std::string>());
    }
    return out;
}

} // namespace detail

inline TimedUtterance utterance_from_json(const nlohmann::json &j, const std::string &where = "record") {
    if (!j.is_object())
        throw DataError(where + ": record is not a JSON object");
    TimedUtterance utt;
    try {
        utt.id = j.at("id").get<std::string>();
        const auto &segs = j.at("segments");
        if (!segs.is_array())
            throw DataError(where + ": 'segments' must be an array");
        for (std::size_t i = 0; i < segs.size(); ++i) {
            const auto &s = segs[i];
            TimedSegment seg;
            seg.index = i;
            seg.duration_ms = s.at("duration_ms").get<Millis>();
            seg.payload = detail::tokens_field(s, "tokens", where);
            utt.segments.push_back(std::move(seg));
        }
        if (j.contains("ref_si") && !j["ref_si"].is_null())
            utt.ref_si = detail::tokens_field(j, "ref_si", where);
        if (j.contains("ref_off") && !j["ref_off"].is_null())
            utt.ref_off = detail::tokens_field(j, "ref_off", where);
    } catch (const nlohmann::json::exception &e) {
        throw DataError(where + ": " + e.what());
    }
    validate(utt);
    return utt;
}

inline nlohmann::json utterance_to_json(const TimedUtterance &utt) {
    nlohmann::json segs = nlohmann::json::array();
    for (const auto &s : utt.segments)
        segs.push_back({{"duration_ms", s.duration_ms}, {"tokens", s.payload}});
    nlohmann::json j{{"id", utt.id}, {"segments", std::move(segs)}};
    if (utt.ref_si)
        j["ref_si"] = *utt.ref_si;
    if (utt.ref_off)
        j["ref_off"] = *utt.ref_off;
    return j;
}

inline std::vector<TimedUtterance> read_corpus(std::istream &in, const std::string &name = "corpus") {
    std::vector<TimedUtterance> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        const std::string where = name + ":" + std::to_string(lineno);
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw DataError(where + ": not valid JSON");
        out.push_back(utterance_from_json(j, where));
    }
    return out;
}

inline std::vector<TimedUtterance> read_corpus_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open corpus '" + path + "'");
    return read_corpus(in, path);
}

inline void write_corpus(std::ostream &out, const std::vector<TimedUtterance> &corpus) {
    for (const auto &utt : corpus)
        out << utterance_to_json(utt).dump() << '\n';
}

} // namespace simulst
