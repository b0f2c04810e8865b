#include "ars/process_provider.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include <cerrno>
#include <cmath>
#include <cstring>

#include "ars/error.hpp"

namespace ars {

// One child process talking over a socketpair bound to its stdin and stdout.
struct ProcessProvider::Worker {
  pid_t pid = -1;
  int fd = -1;
  std::string buffer;

  ~Worker() { shutdown(); }

  void spawn(const std::string& command) {
    int sv[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
      throw provider_error(std::string("socketpair failed: ") + std::strerror(errno));
    }
    pid = ::fork();
    if (pid < 0) {
      ::close(sv[0]);
      ::close(sv[1]);
      throw provider_error(std::string("fork failed: ") + std::strerror(errno));
    }
    if (pid == 0) {
      // Own process group, so the whole command tree can be killed together.
      ::setpgid(0, 0);
      ::dup2(sv[1], STDIN_FILENO);
      ::dup2(sv[1], STDOUT_FILENO);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(sv[1]);
    fd = sv[0];
  }

  void send_line(const std::string& line) {
    std::string data = line + "\n";
    std::size_t off = 0;
    while (off < data.size()) {
      ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw provider_error(std::string("provider write failed: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::string read_line(std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      if (auto nl = buffer.find('\n'); nl != std::string::npos) {
        std::string line = buffer.substr(0, nl);
        buffer.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) throw provider_error("provider timed out");
      pollfd p{fd, POLLIN, 0};
      int r = ::poll(&p, 1, static_cast<int>(left.count()));
      if (r < 0) {
        if (errno == EINTR) continue;
        throw provider_error(std::string("poll failed: ") + std::strerror(errno));
      }
      if (r == 0) throw provider_error("provider timed out");
      char chunk[4096];
      ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw provider_error(std::string("provider read failed: ") + std::strerror(errno));
      }
      if (n == 0) throw provider_error("provider closed its output");
      buffer.append(chunk, static_cast<std::size_t>(n));
    }
  }

  void shutdown() {
    if (fd >= 0) {
      ::shutdown(fd, SHUT_RDWR);
      ::close(fd);
      fd = -1;
    }
    if (pid > 0) {
      for (int i = 0; i < 50; ++i) {
        if (::waitpid(pid, nullptr, WNOHANG) == pid) {
          ::kill(-pid, SIGKILL);  // stragglers left behind by the shell
          pid = -1;
          return;
        }
        ::usleep(10000);
      }
      ::kill(-pid, SIGKILL);
      ::waitpid(pid, nullptr, 0);
      pid = -1;
    }
  }
};

namespace {

nlohmann::json parse_reply(const std::string& line, const char* what) {
  try {
    auto j = nlohmann::json::parse(line);
    if (!j.is_object()) throw provider_error(std::string(what) + " reply is not an object");
    if (auto e = j.find("error"); e != j.end()) {
      throw provider_error(std::string(what) + " reported error: " + e->dump());
    }
    return j;
  } catch (const nlohmann::json::parse_error&) {
    throw provider_error(std::string("non-JSON ") + what + " reply: " + line);
  }
}

}  // namespace

ProcessProvider::ProcessProvider(std::string command) : ProcessProvider(std::move(command), Options{}) {}

ProcessProvider::ProcessProvider(std::string command, Options options)
    : command_(std::move(command)), options_(options) {
  if (options_.workers == 0) options_.workers = 1;
  for (std::size_t i = 0; i < options_.workers; ++i) {
    auto w = std::make_unique<Worker>();
    w->spawn(command_);
    auto hello = parse_reply(w->read_line(options_.timeout), "handshake");
    auto proto = hello.find("proto");
    if (proto == hello.end() || !proto->is_number_integer() || proto->get<int>() != 1) {
      throw provider_error("provider handshake must announce proto 1, got: " + hello.dump());
    }
    std::optional<std::size_t> dim;
    if (auto d = hello.find("dim"); d != hello.end() && !d->is_null()) {
      if (!d->is_number_unsigned() || d->get<std::size_t>() == 0) {
        throw provider_error("provider handshake has invalid dim: " + d->dump());
      }
      dim = d->get<std::size_t>();
    }
    if (dim) {
      if (dim_ && *dim_ != *dim) throw provider_error("provider workers disagree on dim");
      dim_ = dim;
    }
    free_.push_back(w.get());
    workers_.push_back(std::move(w));
  }
}

ProcessProvider::~ProcessProvider() = default;

std::optional<std::size_t> ProcessProvider::dim() const {
  std::lock_guard lock(mu_);
  return dim_;
}

std::string ProcessProvider::request(const std::string& line) const {
  Worker* w = nullptr;
  {
    std::unique_lock lock(mu_);
    free_cv_.wait(lock, [&] { return !free_.empty(); });
    w = free_.back();
    free_.pop_back();
  }
  struct Release {
    const ProcessProvider* self;
    Worker* w;
    ~Release() {
      {
        std::lock_guard lock(self->mu_);
        self->free_.push_back(w);
      }
      self->free_cv_.notify_one();
    }
  } release{this, w};
  if (w->fd < 0) throw provider_error("provider worker stopped after an earlier failure");
  try {
    w->send_line(line);
    return w->read_line(options_.timeout);
  } catch (...) {
    // A late or partial reply would desynchronize the stream; retire the worker.
    w->shutdown();
    throw;
  }
}

SentimentPair ProcessProvider::sentiment(const Sentence& t) const {
  nlohmann::json req = {{"op", "sentiment"}, {"text", t.raw_text}};
  auto reply = parse_reply(request(req.dump()), "sentiment");
  auto p = reply.find("positive");
  auto n = reply.find("negative");
  if (p == reply.end() || n == reply.end() || !p->is_number() || !n->is_number()) {
    throw provider_error("sentiment reply needs numeric positive and negative: " + reply.dump());
  }
  SentimentPair pair{p->get<double>(), n->get<double>()};
  try {
    validate(pair);
  } catch (const Error& e) {
    throw provider_error(std::string("sentiment reply: ") + e.what());
  }
  return pair;
}

Embedding ProcessProvider::embed(std::string_view raw_text) const {
  nlohmann::json req = {{"op", "embed"}, {"text", std::string(raw_text)}};
  auto reply = parse_reply(request(req.dump()), "embed");
  auto v = reply.find("vector");
  if (v == reply.end() || !v->is_array()) {
    throw provider_error("embed reply needs a 'vector' array: " + reply.dump());
  }
  Embedding e;
  for (const auto& x : *v) {
    if (!x.is_number()) throw provider_error("embed reply has a non-numeric component");
    e.values.push_back(x.get<double>());
  }
  try {
    validate(e);
  } catch (const Error& err) {
    throw provider_error(std::string("embed reply: ") + err.what());
  }
  std::lock_guard lock(mu_);
  if (!dim_) dim_ = e.dim();
  if (*dim_ != e.dim()) {
    throw provider_error("embed reply has dim " + std::to_string(e.dim()) + ", session dim is " +
                         std::to_string(*dim_));
  }
  return e;
}

}  // namespace ars
