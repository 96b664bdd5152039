#include "arpbo/external.hpp"

#include <cerrno>
#include <csignal>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "arpbo/errors.hpp"

namespace arpbo {

namespace {

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

}  // namespace

ExternalResult run_external(const std::string& command, const std::string& input) {
  // A child that exits without reading stdin must not kill us.
  static const bool ignore_sigpipe = [] { return std::signal(SIGPIPE, SIG_IGN) != SIG_ERR; }();
  (void)ignore_sigpipe;

  int to_child[2], from_child[2];
  if (::pipe(to_child) != 0) throw Error("pipe failed");
  if (::pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw Error("pipe failed");
  }
  const pid_t pid = ::fork();
  if (pid < 0) throw Error("fork failed");
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  int write_fd = to_child[1], read_fd = from_child[0];
  ::close(to_child[0]);
  ::close(from_child[1]);

  const std::string payload = input + "\n";
  std::size_t sent = 0;
  while (sent < payload.size()) {
    const auto n = ::write(write_fd, payload.data() + sent, payload.size() - sent);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    sent += static_cast<std::size_t>(n);
  }
  close_fd(write_fd);

  std::string output;
  char buf[4096];
  for (;;) {
    const auto n = ::read(read_fd, buf, sizeof buf);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    output.append(buf, static_cast<std::size_t>(n));
  }
  close_fd(read_fd);

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }

  ExternalResult r;
  r.value = std::numeric_limits<double>::quiet_NaN();
  r.exit_status = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  if (r.exit_status != 0) {
    r.problem = "command exited with status " + std::to_string(r.exit_status);
    return r;
  }
  std::istringstream in(output);
  std::string token;
  if (!(in >> token)) {
    r.problem = "command printed no value";
    return r;
  }
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') {
    r.problem = "command output is not a number";
    return r;
  }
  r.value = v;
  r.ok = std::isfinite(v);
  if (!r.ok) r.problem = "command returned a non-finite value";
  return r;
}

}  // namespace arpbo
