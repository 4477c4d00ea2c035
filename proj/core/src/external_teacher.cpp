#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstring>
#include <mutex>
#include <sstream>

#include "ddt/error.hpp"
#include "ddt/teacher.hpp"

extern char** environ;

namespace ddt {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::size_t kStderrKeep = 2048;

void set_nonblocking(int fd) { ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK); }

std::string format_row(const CovariateSchema& schema, std::span<const double> row) {
  std::string out;
  char buf[32];
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (j) out.push_back(',');
    if (schema[j].is_continuous()) {
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, row[j]);
      out.append(buf, ptr);
    } else {
      out += schema[j].categorical().levels[static_cast<std::size_t>(row[j])];
    }
  }
  out.push_back('\n');
  return out;
}

}  // namespace

struct ExternalTeacher::Impl {
  std::string command;
  CovariateSchema schema;
  ExternalTeacherOptions options;
  pid_t pid = -1;
  int in_fd = -1;   // child's stdin
  int out_fd = -1;  // child's stdout
  int err_fd = -1;  // child's stderr
  std::string out_buffer;
  std::string err_tail;
  bool dead = false;
  std::size_t exchanges = 0;
  mutable std::mutex mutex;

  Impl(std::string cmd, CovariateSchema s, ExternalTeacherOptions o)
      : command(std::move(cmd)), schema(std::move(s)), options(o) {}

  [[noreturn]] void fail(const std::string& what) {
    dead = true;
    std::string msg = "external teacher '" + command + "': " + what;
    if (!err_tail.empty()) msg += "; stderr: " + err_tail;
    throw TeacherError(msg);
  }

  void spawn() {
    ::signal(SIGPIPE, SIG_IGN);
    int in[2], out[2], err[2];
    if (::pipe2(in, O_CLOEXEC) != 0 || ::pipe2(out, O_CLOEXEC) != 0 || ::pipe2(err, O_CLOEXEC) != 0) {
      throw TeacherError("cannot create pipes: " + std::string(std::strerror(errno)));
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in[0], 0);
    posix_spawn_file_actions_adddup2(&actions, out[1], 1);
    posix_spawn_file_actions_adddup2(&actions, err[1], 2);
    std::string sh = "/bin/sh", flag = "-c";
    char* argv[] = {sh.data(), flag.data(), command.data(), nullptr};
    const int rc = ::posix_spawn(&pid, "/bin/sh", &actions, nullptr, argv, environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(in[0]);
    ::close(out[1]);
    ::close(err[1]);
    in_fd = in[1];
    out_fd = out[0];
    err_fd = err[0];
    set_nonblocking(in_fd);
    set_nonblocking(out_fd);
    set_nonblocking(err_fd);
    if (rc != 0) {
      pid = -1;
      fail("cannot start: " + std::string(std::strerror(rc)));
    }
  }

  void drain_stderr() {
    char buf[4096];
    for (;;) {
      const ssize_t k = ::read(err_fd, buf, sizeof buf);
      if (k <= 0) return;
      err_tail.append(buf, static_cast<std::size_t>(k));
      if (err_tail.size() > kStderrKeep) err_tail.erase(0, err_tail.size() - kStderrKeep);
    }
  }

  // Writes `request` and reads stdout until `lines` complete lines are
  // buffered, all before `deadline`.
  std::vector<std::string> exchange(const std::string& request, std::size_t lines, Clock::time_point deadline) {
    std::size_t written = 0;
    std::vector<std::string> replies;
    auto take_lines = [&] {
      std::size_t pos;
      while (replies.size() < lines && (pos = out_buffer.find('\n')) != std::string::npos) {
        std::string line = out_buffer.substr(0, pos);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        replies.push_back(std::move(line));
        out_buffer.erase(0, pos + 1);
      }
    };
    take_lines();
    while (replies.size() < lines || written < request.size()) {
      const auto now = Clock::now();
      if (now >= deadline) fail("timed out");
      const auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
      pollfd fds[3] = {{out_fd, POLLIN, 0}, {err_fd, POLLIN, 0}, {in_fd, POLLOUT, 0}};
      const nfds_t count = written < request.size() ? 3 : 2;
      const int rc = ::poll(fds, count, static_cast<int>(std::min<long long>(wait + 1, 1000)));
      if (rc < 0 && errno != EINTR) fail("poll failed");
      if (fds[1].revents) drain_stderr();
      if (count == 3 && (fds[2].revents & (POLLOUT | POLLERR | POLLHUP))) {
        const ssize_t k = ::write(in_fd, request.data() + written, request.size() - written);
        if (k < 0 && errno != EAGAIN && errno != EINTR) {
          drain_stderr();
          fail("process exited (write failed)");
        }
        if (k > 0) written += static_cast<std::size_t>(k);
      }
      if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
        char buf[65536];
        const ssize_t k = ::read(out_fd, buf, sizeof buf);
        if (k == 0) {
          drain_stderr();
          fail("process exited after " + std::to_string(replies.size()) + " of " + std::to_string(lines) +
               " reply lines");
        }
        if (k > 0) {
          out_buffer.append(buf, static_cast<std::size_t>(k));
          take_lines();
        }
      }
    }
    return replies;
  }

  void handshake() {
    const auto lines = exchange({}, 1, Clock::now() + options.timeout);
    if (lines.front() != "DDT-TEACHER 1") fail("bad handshake '" + lines.front() + "'");
  }

  double parse_reply(const std::string& text, std::size_t i) {
    std::string s = text;
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(0, 1);
    if (schema.response().is_categorical()) {
      const auto& classes = schema.response().classes;
      for (std::size_t c = 0; c < classes.size(); ++c) {
        if (classes[c] == s) return static_cast<double>(c);
      }
      fail("reply " + std::to_string(i + 1) + " is not a known class: '" + s + "'");
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
      fail("reply " + std::to_string(i + 1) + " is not a finite number: '" + s + "'");
    }
    return v;
  }

  void shutdown() {
    if (in_fd >= 0) ::close(in_fd);
    if (pid > 0) {
      for (int i = 0; i < 50; ++i) {
        if (::waitpid(pid, nullptr, WNOHANG) == pid) {
          pid = -1;
          break;
        }
        ::usleep(10000);
      }
      if (pid > 0) {
        ::kill(pid, SIGKILL);
        ::waitpid(pid, nullptr, 0);
      }
    }
    if (out_fd >= 0) ::close(out_fd);
    if (err_fd >= 0) ::close(err_fd);
  }
};

ExternalTeacher::ExternalTeacher(std::string command, CovariateSchema schema, ExternalTeacherOptions options)
    : impl_(std::make_unique<Impl>(std::move(command), std::move(schema), options)) {
  try {
    impl_->spawn();
    impl_->handshake();
  } catch (...) {
    impl_->shutdown();
    throw;
  }
}

ExternalTeacher::~ExternalTeacher() { impl_->shutdown(); }

std::vector<double> ExternalTeacher::evaluate(const RowMatrix& rows) const {
  std::lock_guard lock(impl_->mutex);
  if (impl_->dead) throw TeacherError("external teacher '" + impl_->command + "' is no longer running");
  if (rows.rows() == 0) return {};
  if (rows.cols() != impl_->schema.size()) throw ContractError("row width does not match the teacher schema");
  std::string request = "PREDICT " + std::to_string(rows.rows()) + " " + std::to_string(rows.cols()) + "\n";
  for (std::size_t i = 0; i < rows.rows(); ++i) request += format_row(impl_->schema, rows.row(i));
  const auto replies = impl_->exchange(request, rows.rows(), Clock::now() + impl_->options.timeout);
  std::vector<double> out;
  out.reserve(replies.size());
  for (std::size_t i = 0; i < replies.size(); ++i) out.push_back(impl_->parse_reply(replies[i], i));
  ++impl_->exchanges;
  return out;
}

const ResponseKind& ExternalTeacher::response_kind() const { return impl_->schema.response(); }

std::string ExternalTeacher::descriptor() const { return "external(" + impl_->command + ")"; }

std::size_t ExternalTeacher::exchange_count() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->exchanges;
}

std::shared_ptr<ExternalTeacher> connect_external_teacher(const std::string& command, const CovariateSchema& schema,
                                                          ExternalTeacherOptions options) {
  return std::make_shared<ExternalTeacher>(command, schema, options);
}

}  // namespace ddt
