#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <utility>

#include "simulst/agents/agent.hpp"
#include "simulst/agents/protocol.hpp"
#include "simulst/agents/transport.hpp"
#include "simulst/core/error.hpp"

namespace simulst {

// Client side of the line protocol. Construction performs the INIT/READY handshake; destruction
// sends BYE. Every call is one synchronous request/response exchange.
class ExternalAgent : public Agent {
  public:
    ExternalAgent(std::unique_ptr<LineChannel> channel, protocol::TagVocabulary tags,
                  std::chrono::milliseconds timeout = std::chrono::seconds(30))
        : channel_(std::move(channel)), timeout_(timeout) {
        const auto reply = exchange(protocol::init(tags));
        const auto kind = protocol::message_type(reply);
        if (kind == protocol::type::kError)
            throw AgentError("agent refused handshake: " + describe_error(reply));
        if (kind != protocol::type::kReady)
            throw AgentError("expected READY in reply to INIT, got " + kind);
        if (!reply.contains("version") || reply["version"] != protocol::kVersion)
            throw AgentError("protocol version mismatch: harness speaks " + std::to_string(protocol::kVersion) +
                             ", agent answered " + (reply.contains("version") ? reply["version"].dump() : "nothing"));
    }

    ExternalAgent(const ExternalAgent &) = delete;
    ExternalAgent &operator=(const ExternalAgent &) = delete;

    ~ExternalAgent() override {
        try {
            channel_->write_line(protocol::serialize(protocol::bye()));
            channel_->read_line(std::chrono::milliseconds(500));
        } catch (const Error &) {
            // The agent may already be gone.
        }
    }

    Tokens hypothesize(const AgentRequest &request) override {
        const auto reply = exchange(protocol::hypothesize(request));
        const auto kind = protocol::message_type(reply);
        if (kind == protocol::type::kError)
            throw AgentError("agent error: " + describe_error(reply));
        if (kind != protocol::type::kHypothesis)
            throw AgentError("expected HYPOTHESIS, got " + kind);
        return protocol::token_array(reply, "tokens");
    }

    void reset() override {
        const auto reply = exchange(protocol::reset());
        const auto kind = protocol::message_type(reply);
        if (kind == protocol::type::kError)
            throw AgentError("agent error on RESET: " + describe_error(reply));
        if (kind != protocol::type::kReady)
            throw AgentError("expected READY in reply to RESET, got " + kind);
    }

  private:
    protocol::Json exchange(const protocol::Json &request) {
        channel_->write_line(protocol::serialize(request));
        return protocol::parse(channel_->read_line(timeout_));
    }

    static std::string describe_error(const protocol::Json &reply) {
        std::string out = reply.value("code", std::string("unknown"));
        if (reply.contains("message") && reply["message"].is_string())
            out += ": " + reply["message"].get<std::string>();
        return out;
    }

    std::unique_ptr<LineChannel> channel_;
    std::chrono::milliseconds timeout_;
};

// Reads request lines from `channel` and answers them until BYE or end of stream.
inline void serve(Agent &agent, LineChannel &channel, std::chrono::milliseconds idle_timeout = std::chrono::hours(24)) {
    protocol::Server server(agent);
    for (;;) {
        std::string line;
        try {
            line = channel.read_line(idle_timeout);
        } catch (const AgentError &) {
            return;
        }
        bool done = false;
        channel.write_line(protocol::serialize(server.handle(line, done)));
        if (done)
            return;
    }
}

} // namespace simulst
