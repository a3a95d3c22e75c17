#pragma once

#include <cerrno>
#include <chrono>
#include <cstring>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "simulst/core/error.hpp"

extern char **environ;

namespace simulst {

// A bidirectional line stream to an agent.
class LineChannel {
  public:
    virtual ~LineChannel() = default;
    virtual void write_line(std::string_view line) = 0;
    // Throws AgentError on timeout or end of stream.
    virtual std::string read_line(std::chrono::milliseconds timeout) = 0;
};

class UniqueFd {
  public:
    UniqueFd() = default;
    explicit UniqueFd(int fd) : fd_(fd) {}
    UniqueFd(UniqueFd &&other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
    UniqueFd &operator=(UniqueFd &&other) noexcept {
        if (this != &other) {
            reset();
            fd_ = std::exchange(other.fd_, -1);
        }
        return *this;
    }
    UniqueFd(const UniqueFd &) = delete;
    UniqueFd &operator=(const UniqueFd &) = delete;
    ~UniqueFd() { reset(); }

    int get() const { return fd_; }
    explicit operator bool() const { return fd_ >= 0; }
    void reset() {
        if (fd_ >= 0)
            ::close(fd_);
        fd_ = -1;
    }

  private:
    int fd_ = -1;
};

// Line channel over a connected stream socket (socketpair or TCP).
class SocketChannel : public LineChannel {
  public:
    static constexpr std::size_t kMaxLineBytes = 16u << 20;

    explicit SocketChannel(UniqueFd fd) : fd_(std::move(fd)) {}

    void write_line(std::string_view line) override {
        std::string buf(line);
        buf.push_back('\n');
        std::size_t sent = 0;
        while (sent < buf.size()) {
            const ssize_t n = ::send(fd_.get(), buf.data() + sent, buf.size() - sent, MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR)
                    continue;
                throw AgentError(std::string("agent connection write failed: ") + std::strerror(errno));
            }
            sent += static_cast<std::size_t>(n);
        }
    }

    std::string read_line(std::chrono::milliseconds timeout) override {
        const auto deadline = std::chrono::steady_clock::now() + timeout;
        for (;;) {
            if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
                std::string line = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                if (!line.empty() && line.back() == '\r')
                    line.pop_back();
                return line;
            }
            if (buffer_.size() > kMaxLineBytes)
                throw AgentError("agent message exceeds the maximum line length");
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                deadline - std::chrono::steady_clock::now());
            if (left.count() <= 0)
                throw AgentError("agent timed out after " + std::to_string(timeout.count()) + " ms");
            pollfd pfd{fd_.get(), POLLIN, 0};
            const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
            if (ready < 0) {
                if (errno == EINTR)
                    continue;
                throw AgentError(std::string("poll failed: ") + std::strerror(errno));
            }
            if (ready == 0)
                continue;
            char chunk[4096];
            const ssize_t n = ::recv(fd_.get(), chunk, sizeof chunk, 0);
            if (n < 0) {
                if (errno == EINTR)
                    continue;
                throw AgentError(std::string("agent connection read failed: ") + std::strerror(errno));
            }
            if (n == 0)
                throw AgentError("agent closed the connection");
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

  protected:
    int native_handle() const { return fd_.get(); }

  private:
    UniqueFd fd_;
    std::string buffer_;
};

// Runs `/bin/sh -c command` with its stdin and stdout bound to one end of a socketpair.
class ProcessChannel : public SocketChannel {
  public:
    static std::unique_ptr<ProcessChannel> spawn(const std::string &command) {
        int fds[2];
        if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0)
            throw AgentError(std::string("socketpair failed: ") + std::strerror(errno));
        UniqueFd parent(fds[0]);
        UniqueFd child(fds[1]);

        posix_spawn_file_actions_t actions;
        posix_spawn_file_actions_init(&actions);
        posix_spawn_file_actions_adddup2(&actions, child.get(), STDIN_FILENO);
        posix_spawn_file_actions_adddup2(&actions, child.get(), STDOUT_FILENO);
        std::string shell = "/bin/sh";
        std::string dash_c = "-c";
        std::string cmd = command;
        char *argv[] = {shell.data(), dash_c.data(), cmd.data(), nullptr};
        pid_t pid = -1;
        const int rc = ::posix_spawn(&pid, "/bin/sh", &actions, nullptr, argv, environ);
        posix_spawn_file_actions_destroy(&actions);
        if (rc != 0)
            throw AgentError("cannot start agent '" + command + "': " + std::strerror(rc));
        return std::unique_ptr<ProcessChannel>(new ProcessChannel(std::move(parent), pid));
    }

    ~ProcessChannel() override {
        if (pid_ <= 0)
            return;
        ::shutdown(native_handle(), SHUT_WR);
        int status = 0;
        for (int i = 0; i < 50; ++i) {
            if (::waitpid(pid_, &status, WNOHANG) == pid_)
                return;
            ::usleep(10'000);
        }
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, &status, 0);
    }

  private:
    ProcessChannel(UniqueFd fd, pid_t pid) : SocketChannel(std::move(fd)), pid_(pid) {}

    pid_t pid_ = -1;
};

inline std::unique_ptr<SocketChannel> connect_tcp(const std::string &host, int port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo *res = nullptr;
    const std::string service = std::to_string(port);
    if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0)
        throw AgentError("cannot resolve agent host '" + host + "': " + ::gai_strerror(rc));
    std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, &::freeaddrinfo);
    for (const addrinfo *ai = res; ai; ai = ai->ai_next) {
        UniqueFd fd(::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol));
        if (!fd)
            continue;
        if (::connect(fd.get(), ai->ai_addr, ai->ai_addrlen) == 0)
            return std::make_unique<SocketChannel>(std::move(fd));
    }
    throw AgentError("cannot connect to agent at " + host + ":" + service);
}

} // namespace simulst
