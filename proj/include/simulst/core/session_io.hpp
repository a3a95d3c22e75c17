#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "simulst/core/error.hpp"
#include "simulst/core/types.hpp"

namespace simulst {

// Compact event encoding: ["R", segment_index, end_time_ms, source_tokens] and ["W", token, emit_time_ms].
inline nlohmann::json session_log_to_json(const SessionLog &log) {
    nlohmann::json events = nlohmann::json::array();
    for (const auto &ev : log.events) {
        if (const auto *r = std::get_if<ReadEvent>(&ev))
            events.push_back({"R", r->segment_index, r->end_time_ms, r->source_tokens});
        else {
            const auto &w = std::get<WriteEvent>(ev);
            events.push_back({"W", w.token, w.emit_time_ms});
        }
    }
    return {{"events", std::move(events)},
            {"source_total_ms", log.source_total_ms},
            {"finished", log.finished},
            {"prefix_conflicts", log.prefix_conflicts}};
}

inline SessionLog session_log_from_json(const nlohmann::json &j) {
    try {
        SessionLog log;
        for (const auto &e : j.at("events")) {
            const auto tag = e.at(0).get<std::string>();
            if (tag == "R")
                log.events.emplace_back(ReadEvent{e.at(1).get<std::size_t>(), e.at(2).get<Millis>(), e.at(3).get<std::size_t>()});
            else if (tag == "W")
                log.events.emplace_back(WriteEvent{e.at(1).get<std::string>(), e.at(2).get<Millis>()});
            else
                throw DataError("session log: unknown event tag '" + tag + "'");
        }
        log.source_total_ms = j.at("source_total_ms").get<Millis>();
        log.finished = j.at("finished").get<bool>();
        log.prefix_conflicts = j.value("prefix_conflicts", std::size_t{0});
        return log;
    } catch (const nlohmann::json::exception &e) {
        throw DataError(std::string("session log: ") + e.what());
    }
}

} // namespace simulst
