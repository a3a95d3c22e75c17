#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "simulst/core/error.hpp"
#include "simulst/core/types.hpp"

namespace simulst::metrics {

// One point of a latency-quality curve. Missing latency (a corpus with no output) is empty in CSV and
// null in JSON.
struct MetricReport {
    std::string system;
    Millis segment_ms = 0;
    std::optional<double> al_ms;
    std::optional<double> atd_ms;
    double bleu = 0.0;
    double length_ratio = 0.0;

    bool operator==(const MetricReport &) const = default;
};

inline constexpr std::string_view kReportCsvHeader = "system,segment_ms,al_ms,atd_ms,bleu,length_ratio";

// Shortest representation that parses back to the same double.
inline std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_number(std::string_view text, std::string_view field) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw DataError("report: field '" + std::string(field) + "' is not a number: '" + std::string(text) + "'");
    return v;
}

namespace detail {

inline std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::vector<std::string> csv_split(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

inline std::string optional_number(const std::optional<double> &v) { return v ? format_number(*v) : std::string(); }

} // namespace detail

inline std::string to_csv_row(const MetricReport &r) {
    return detail::csv_escape(r.system) + "," + std::to_string(r.segment_ms) + "," + detail::optional_number(r.al_ms) +
           "," + detail::optional_number(r.atd_ms) + "," + format_number(r.bleu) + "," + format_number(r.length_ratio);
}

inline void write_reports_csv(std::ostream &out, const std::vector<MetricReport> &reports) {
    out << kReportCsvHeader << '\n';
    for (const auto &r : reports)
        out << to_csv_row(r) << '\n';
}

inline std::vector<MetricReport> read_reports_csv(std::istream &in) {
    std::string line;
    if (!std::getline(in, line) || line != kReportCsvHeader)
        throw DataError("report CSV: missing or unexpected header");
    std::vector<MetricReport> out;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto f = detail::csv_split(line);
        if (f.size() != 6)
            throw DataError("report CSV: expected 6 fields, got " + std::to_string(f.size()));
        MetricReport r;
        r.system = f[0];
        r.segment_ms = static_cast<Millis>(parse_number(f[1], "segment_ms"));
        if (!f[2].empty())
            r.al_ms = parse_number(f[2], "al_ms");
        if (!f[3].empty())
            r.atd_ms = parse_number(f[3], "atd_ms");
        r.bleu = parse_number(f[4], "bleu");
        r.length_ratio = parse_number(f[5], "length_ratio");
        out.push_back(std::move(r));
    }
    return out;
}

inline nlohmann::json to_json(const MetricReport &r) {
    nlohmann::json j{{"system", r.system},
                     {"segment_ms", r.segment_ms},
                     {"bleu", r.bleu},
                     {"length_ratio", r.length_ratio}};
    j["al_ms"] = r.al_ms ? nlohmann::json(*r.al_ms) : nlohmann::json(nullptr);
    j["atd_ms"] = r.atd_ms ? nlohmann::json(*r.atd_ms) : nlohmann::json(nullptr);
    return j;
}

inline MetricReport report_from_json(const nlohmann::json &j) {
    try {
        MetricReport r;
        r.system = j.at("system").get<std::string>();
        r.segment_ms = j.at("segment_ms").get<Millis>();
        if (!j.at("al_ms").is_null())
            r.al_ms = j.at("al_ms").get<double>();
        if (!j.at("atd_ms").is_null())
            r.atd_ms = j.at("atd_ms").get<double>();
        r.bleu = j.at("bleu").get<double>();
        r.length_ratio = j.at("length_ratio").get<double>();
        return r;
    } catch (const nlohmann::json::exception &e) {
        throw DataError(std::string("report record: ") + e.what());
    }
}

inline void write_reports_jsonl(std::ostream &out, const std::vector<MetricReport> &reports) {
    for (const auto &r : reports)
        out << to_json(r).dump() << '\n';
}

inline std::vector<MetricReport> read_reports_jsonl(std::istream &in) {
    std::vector<MetricReport> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw DataError("report JSONL: invalid line");
        out.push_back(report_from_json(j));
    }
    return out;
}

} // namespace simulst::metrics
