#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "simulst/core/error.hpp"
#include "simulst/core/types.hpp"
#include "simulst/metrics/report.hpp"

namespace simulst::eval {

// File exchange with external scorers (neural metrics run outside the harness).
//
// export: one request per line, {"segment_ms", "index", "id", "hypothesis", "reference"}.
// import: one score per line, {"segment_ms", "index", "score"}; every exported request must be
//         scored exactly once.

struct ScoreRequest {
    Millis segment_ms = 0;
    std::size_t index = 0;
    std::string id;
    std::string hypothesis;
    std::string reference;
};

struct ExternalScore {
    Millis segment_ms = 0;
    double mean = 0.0;
    std::size_t count = 0;

    bool operator==(const ExternalScore &) const = default;
};

namespace detail {

inline std::vector<std::string> read_lines(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open '" + path.string() + "'");
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line))
        out.push_back(line);
    return out;
}

} // namespace detail

// Collects requests from an evaluate output directory (hyp_<ms>.txt, ref.txt, report.csv and the
// ids in sentences.jsonl).
inline std::vector<ScoreRequest> collect_requests(const std::string &run_dir) {
    namespace fs = std::filesystem;
    std::ifstream report(fs::path(run_dir) / "report.csv");
    if (!report)
        throw DataError("no report.csv in '" + run_dir + "'");
    const auto reports = metrics::read_reports_csv(report);
    const auto refs = detail::read_lines(fs::path(run_dir) / "ref.txt");

    std::map<Millis, std::vector<std::string>> ids;
    for (const auto &line : detail::read_lines(fs::path(run_dir) / "sentences.jsonl")) {
        if (line.empty())
            continue;
        const auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw DataError("sentences.jsonl: invalid line");
        ids[j.at("segment_ms").get<Millis>()].push_back(j.at("id").get<std::string>());
    }

    std::vector<ScoreRequest> out;
    for (const auto &r : reports) {
        const auto hyps = detail::read_lines(fs::path(run_dir) / ("hyp_" + std::to_string(r.segment_ms) + ".txt"));
        if (hyps.size() != refs.size() || ids[r.segment_ms].size() != refs.size())
            throw DataError("run directory is inconsistent at segment size " + std::to_string(r.segment_ms));
        for (std::size_t i = 0; i < hyps.size(); ++i)
            out.push_back({r.segment_ms, i, ids[r.segment_ms][i], hyps[i], refs[i]});
    }
    return out;
}

inline void write_requests(std::ostream &out, const std::vector<ScoreRequest> &requests) {
    for (const auto &r : requests)
        out << nlohmann::json{{"segment_ms", r.segment_ms},
                              {"index", r.index},
                              {"id", r.id},
                              {"hypothesis", r.hypothesis},
                              {"reference", r.reference}}
                   .dump()
            << '\n';
}

// Averages imported per-sentence scores per segment size after checking they cover `requests`
// exactly.
inline std::vector<ExternalScore> import_scores(std::istream &in, const std::vector<ScoreRequest> &requests) {
    std::map<std::pair<Millis, std::size_t>, double> scores;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        const auto j = nlohmann::json::parse(line, nullptr, false);
        try {
            if (j.is_discarded())
                throw DataError("not JSON");
            const auto key = std::make_pair(j.at("segment_ms").get<Millis>(), j.at("index").get<std::size_t>());
            if (!scores.emplace(key, j.at("score").get<double>()).second)
                throw DataError("duplicate score");
        } catch (const nlohmann::json::exception &e) {
            throw DataError("scores line " + std::to_string(lineno) + ": " + e.what());
        } catch (const DataError &e) {
            throw DataError("scores line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    std::map<Millis, ExternalScore> agg;
    for (const auto &r : requests) {
        const auto it = scores.find({r.segment_ms, r.index});
        if (it == scores.end())
            throw DataError("missing score for segment_ms=" + std::to_string(r.segment_ms) +
                            " index=" + std::to_string(r.index));
        auto &a = agg[r.segment_ms];
        a.segment_ms = r.segment_ms;
        a.mean += it->second;
        ++a.count;
        scores.erase(it);
    }
    if (!scores.empty())
        throw DataError("scores file holds " + std::to_string(scores.size()) + " entries without a request");
    std::vector<ExternalScore> out;
    for (auto &[size, a] : agg) {
        a.mean /= static_cast<double>(a.count);
        out.push_back(a);
    }
    return out;
}

} // namespace simulst::eval
