#pragma once

#include <stdexcept>
#include <string>

namespace simulst {

// Exception families map one-to-one onto the CLI exit codes.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

// Agent transport, handshake and protocol failures.
class AgentError : public Error {
  public:
    using Error::Error;
};

// Unreadable or malformed corpora, empty inputs, invariant violations in data.
class DataError : public Error {
  public:
    using Error::Error;
};

// Raised by the session engine (divergence guard, agent failure at a segment).
class SessionError : public AgentError {
  public:
    SessionError(const std::string &what, std::size_t segment_index)
        : AgentError(what), segment_index_(segment_index) {}

    std::size_t segment_index() const noexcept { return segment_index_; }

  private:
    std::size_t segment_index_;
};

} // namespace simulst
