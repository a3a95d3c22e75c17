#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "simulst/agents/agent.hpp"
#include "simulst/core/error.hpp"
#include "simulst/core/types.hpp"
#include "simulst/policies/style.hpp"

namespace simulst::protocol {

// Newline-delimited JSON messages between the harness and an agent. docs/protocol.md is the
// normative description; tests/golden/ freezes the byte-level form.

using Json = nlohmann::json;

inline constexpr int kVersion = 1;

namespace type {
inline constexpr std::string_view kInit = "INIT";
inline constexpr std::string_view kReady = "READY";
inline constexpr std::string_view kHypothesize = "HYPOTHESIZE";
inline constexpr std::string_view kHypothesis = "HYPOTHESIS";
inline constexpr std::string_view kReset = "RESET";
inline constexpr std::string_view kError = "ERROR";
inline constexpr std::string_view kBye = "BYE";
} // namespace type

namespace code {
inline constexpr std::string_view kUnsupported = "unsupported";
inline constexpr std::string_view kMalformed = "malformed";
inline constexpr std::string_view kVersionMismatch = "version_mismatch";
inline constexpr std::string_view kNotInitialized = "not_initialized";
inline constexpr std::string_view kRejected = "rejected";
} // namespace code

// Tag vocabulary announced at handshake: the token forms of each style tag.
struct TagVocabulary {
    Tokens si;
    Tokens off;

    bool operator==(const TagVocabulary &) const = default;
};

inline Json init(const TagVocabulary &tags, int version = kVersion) {
    return {{"type", type::kInit}, {"version", version}, {"tags", {{"si", tags.si}, {"off", tags.off}}}};
}

inline Json ready(int version = kVersion) { return {{"type", type::kReady}, {"version", version}}; }

inline Json hypothesize(const AgentRequest &request) {
    return {{"type", type::kHypothesize},
            {"source_prefix", request.source_prefix},
            {"forced_prefix", request.forced_prefix},
            {"committed", request.committed}};
}

inline Json hypothesis(const Tokens &tokens) { return {{"type", type::kHypothesis}, {"tokens", tokens}}; }

inline Json reset() { return {{"type", type::kReset}}; }

inline Json error(std::string_view error_code, std::string_view message) {
    return {{"type", type::kError}, {"code", error_code}, {"message", message}};
}

inline Json bye() { return {{"type", type::kBye}}; }

// Canonical wire form: compact, keys sorted, UTF-8, no trailing newline.
inline std::string serialize(const Json &message) { return message.dump(); }

// Throws AgentError on anything that is not a JSON object with a string "type".
inline Json parse(std::string_view line) {
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw AgentError("malformed message: not a JSON object");
    if (!j.contains("type") || !j["type"].is_string())
        throw AgentError("malformed message: missing string field 'type'");
    return j;
}

inline std::string message_type(const Json &message) { return message.at("type").get<std::string>(); }

inline Tokens token_array(const Json &message, const char *field) {
    if (!message.contains(field) || !message[field].is_array())
        throw AgentError(std::string("malformed message: field '") + field + "' must be an array of strings");
    Tokens out;
    for (const auto &t : message[field]) {
        if (!t.is_string())
            throw AgentError(std::string("malformed message: field '") + field + "' must be an array of strings");
        out.push_back(t.get<std::string>());
    }
    return out;
}

inline AgentRequest request_from(const Json &message) {
    return {token_array(message, "source_prefix"), token_array(message, "forced_prefix"),
            token_array(message, "committed")};
}

// Server-side state machine: one response per request line. Returns the response and sets `done`
// after BYE. Malformed input yields an ERROR response and the session continues.
class Server {
  public:
    explicit Server(Agent &agent) : agent_(agent) {}

    bool initialized() const { return initialized_; }
    const TagVocabulary &tags() const { return tags_; }

    Json handle(std::string_view line, bool &done) {
        done = false;
        Json message;
        try {
            message = parse(line);
        } catch (const AgentError &e) {
            return error(code::kMalformed, e.what());
        }
        const auto kind = message_type(message);
        try {
            if (kind == type::kInit) {
                if (!message.contains("version") || !message["version"].is_number_integer())
                    return error(code::kMalformed, "INIT requires an integer 'version'");
                if (message["version"].get<int>() != kVersion)
                    return error(code::kVersionMismatch,
                                 "unsupported protocol version " + message["version"].dump());
                if (message.contains("tags")) {
                    const auto &t = message["tags"];
                    if (!t.is_object())
                        return error(code::kMalformed, "'tags' must be an object");
                    tags_.si = t.contains("si") ? token_array(t, "si") : Tokens{};
                    tags_.off = t.contains("off") ? token_array(t, "off") : Tokens{};
                }
                initialized_ = true;
                agent_.reset();
                return ready();
            }
            if (kind == type::kBye) {
                done = true;
                return bye();
            }
            if (kind == type::kReset) {
                if (!initialized_)
                    return error(code::kNotInitialized, "RESET before INIT");
                agent_.reset();
                return ready();
            }
            if (kind == type::kHypothesize) {
                if (!initialized_)
                    return error(code::kNotInitialized, "HYPOTHESIZE before INIT");
                const auto request = request_from(message);
                try {
                    return hypothesis(agent_.hypothesize(request));
                } catch (const Error &e) {
                    return error(code::kRejected, e.what());
                }
            }
        } catch (const AgentError &e) {
            return error(code::kMalformed, e.what());
        }
        return error(code::kUnsupported, "unsupported message type '" + kind + "'");
    }

  private:
    Agent &agent_;
    TagVocabulary tags_;
    bool initialized_ = false;
};

} // namespace simulst::protocol
