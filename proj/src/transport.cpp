#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>
#include <thread>

#include "diplo/error.hpp"
#include "diplo/protocol.hpp"

namespace diplo {

namespace {

using Clock = std::chrono::steady_clock;

// A peer that vanished must not kill the engine.
void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
  return left > 0 ? static_cast<int>(left) : 0;
}

std::string os_error(const std::string& what) { return what + ": " + std::strerror(errno); }

// Line channel over a pair of descriptors (equal for sockets). Writes are
// non-blocking so a peer that stops reading cannot stall the engine.
class FdTransport : public Transport {
 public:
  FdTransport(int in, int out, pid_t child) : in_(in), out_(out), child_(child) {
    ::fcntl(out_, F_SETFL, ::fcntl(out_, F_GETFL) | O_NONBLOCK);
  }

  ~FdTransport() override {
    if (out_ >= 0 && out_ != in_) ::close(out_);
    if (child_ > 0) reap();
    if (in_ >= 0) ::close(in_);
  }

  void send(const std::string& line) override {
    const std::string data = line + "\n";
    const auto deadline = Clock::now() + std::chrono::seconds(5);
    std::size_t done = 0;
    while (done < data.size()) {
      const ssize_t n = ::write(out_, data.data() + done, data.size() - done);
      if (n > 0) {
        done += static_cast<std::size_t>(n);
        continue;
      }
      if (n < 0 && errno == EINTR) continue;
      if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
        pollfd p{out_, POLLOUT, 0};
        const int wait = remaining_ms(deadline);
        if (wait == 0 || ::poll(&p, 1, wait) == 0) throw TransportError("agent is not reading its input");
        continue;
      }
      throw TransportError(os_error("write to agent failed"));
    }
  }

  std::optional<std::string> receive(std::chrono::milliseconds timeout) override {
    const auto deadline = Clock::now() + timeout;
    for (;;) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      if (eof_) throw TransportError("agent closed the connection");
      pollfd p{in_, POLLIN, 0};
      const int ready = ::poll(&p, 1, remaining_ms(deadline));
      if (ready < 0 && errno == EINTR) continue;
      if (ready < 0) throw TransportError(os_error("poll failed"));
      if (ready == 0) return std::nullopt;
      char chunk[65536];
      const ssize_t n = ::read(in_, chunk, sizeof chunk);
      if (n < 0 && (errno == EINTR || errno == EAGAIN)) continue;
      if (n < 0) throw TransportError(os_error("read from agent failed"));
      if (n == 0) eof_ = true;
      buffer_.append(chunk, static_cast<std::size_t>(n > 0 ? n : 0));
    }
  }

 private:
  // Gives the child a moment to exit after its input closed, then kills it.
  void reap() {
    for (int i = 0; i < 100; ++i) {
      if (::waitpid(child_, nullptr, WNOHANG) != 0) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ::kill(child_, SIGKILL);
    ::waitpid(child_, nullptr, 0);
  }

  int in_;
  int out_;
  pid_t child_;
  std::string buffer_;
  bool eof_ = false;
};

}  // namespace

std::unique_ptr<Transport> spawn_process(const std::string& command) {
  ignore_sigpipe();
  int to_child[2], from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0) throw TransportError(os_error("pipe"));
  if (::pipe2(from_child, O_CLOEXEC) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw TransportError(os_error("pipe"));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
    throw TransportError(os_error("fork"));
  }
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  return std::make_unique<FdTransport>(from_child[0], to_child[1], pid);
}

std::unique_ptr<Transport> connect_tcp(const std::string& host, int port) {
  ignore_sigpipe();
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &found); rc != 0)
    throw TransportError("cannot resolve " + host + ": " + ::gai_strerror(rc));
  std::string last = "no address";
  for (addrinfo* a = found; a; a = a->ai_next) {
    const int fd = ::socket(a->ai_family, a->ai_socktype | SOCK_CLOEXEC, a->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) {
      ::freeaddrinfo(found);
      return std::make_unique<FdTransport>(fd, fd, -1);
    }
    last = std::strerror(errno);
    ::close(fd);
  }
  ::freeaddrinfo(found);
  throw TransportError("cannot connect to " + host + ":" + service + ": " + last);
}

}  // namespace diplo
