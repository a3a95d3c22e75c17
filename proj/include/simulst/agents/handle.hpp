#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "simulst/agents/agent.hpp"
#include "simulst/agents/external.hpp"
#include "simulst/agents/toy.hpp"
#include "simulst/core/error.hpp"
#include "simulst/textproc/tags.hpp"

namespace simulst {

enum class AgentKind { kBuiltinToy, kExternalProcess, kExternalSocket };

// How to reach an agent. Exactly one transport is used, selected by `kind`.
struct AgentHandle {
    AgentKind kind = AgentKind::kBuiltinToy;
    std::string lexicon_path;            // builtin toy
    ToyStyle default_style = ToyStyle::kOffline;
    std::string command;                 // external process
    std::string host = "127.0.0.1";      // external socket
    int port = 0;
    std::chrono::milliseconds timeout{30'000};
    textproc::TagSpec si_tag = textproc::si_tag();
    textproc::TagSpec off_tag = textproc::off_tag();

    void validate() const {
        switch (kind) {
        case AgentKind::kBuiltinToy:
            if (lexicon_path.empty())
                throw ConfigError("toy agent requires a lexicon path");
            break;
        case AgentKind::kExternalProcess:
            if (command.empty())
                throw ConfigError("process agent requires a command");
            break;
        case AgentKind::kExternalSocket:
            if (host.empty() || port <= 0 || port > 65535)
                throw ConfigError("socket agent requires host and a port in 1..65535");
            break;
        }
        if (timeout.count() <= 0)
            throw ConfigError("agent timeout must be positive");
    }
};

inline AgentKind parse_agent_kind(std::string_view name) {
    if (name == "toy" || name == "builtin")
        return AgentKind::kBuiltinToy;
    if (name == "process")
        return AgentKind::kExternalProcess;
    if (name == "socket")
        return AgentKind::kExternalSocket;
    throw ConfigError("unknown agent kind '" + std::string(name) + "' (expected toy, process or socket)");
}

inline ToyStyle parse_toy_style(std::string_view name) {
    if (name == "si")
        return ToyStyle::kSI;
    if (name == "off" || name == "offline")
        return ToyStyle::kOffline;
    throw ConfigError("unknown toy style '" + std::string(name) + "' (expected si or off)");
}

inline std::unique_ptr<Agent> make_agent(const AgentHandle &handle) {
    handle.validate();
    const protocol::TagVocabulary tags{handle.si_tag.token_forms, handle.off_tag.token_forms};
    switch (handle.kind) {
    case AgentKind::kBuiltinToy:
        return std::make_unique<ToyAgent>(load_lexicon(handle.lexicon_path), handle.default_style);
    case AgentKind::kExternalProcess:
        return std::make_unique<ExternalAgent>(ProcessChannel::spawn(handle.command), tags, handle.timeout);
    case AgentKind::kExternalSocket:
        return std::make_unique<ExternalAgent>(connect_tcp(handle.host, handle.port), tags, handle.timeout);
    }
    throw ConfigError("unreachable agent kind");
}

} // namespace simulst
