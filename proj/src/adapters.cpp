#include "genderalt/adapters.hpp"

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include <httplib.h>

#include "genderalt/types.hpp"

namespace genderalt {

SubprocessTransport::SubprocessTransport(std::vector<std::string> argv) {
  if (argv.empty()) throw ConfigError("adapter command is empty");
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0) throw AdapterError(std::string("pipe: ") + std::strerror(errno));
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw AdapterError(std::string("pipe: ") + std::strerror(errno));
  }
  pid_ = fork();
  if (pid_ < 0) throw AdapterError(std::string("fork: ") + std::strerror(errno));
  if (pid_ == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    std::vector<char*> args;
    for (auto& a : argv) args.push_back(a.data());
    args.push_back(nullptr);
    execvp(args[0], args.data());
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  // A dead child must surface as a write error, not kill the process.
  signal(SIGPIPE, SIG_IGN);
}

SubprocessTransport::~SubprocessTransport() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    if (waitpid(pid_, &status, WNOHANG) == 0) {
      kill(pid_, SIGTERM);
      waitpid(pid_, &status, 0);
    }
  }
}

std::string SubprocessTransport::read_line() {
  for (;;) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    char chunk[4096];
    const ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw AdapterError("adapter process closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

nlohmann::json SubprocessTransport::call(const nlohmann::json& request) {
  std::lock_guard lock(mu_);
  const std::string line = request.dump() + "\n";
  std::size_t off = 0;
  while (off < line.size()) {
    const ssize_t n = write(to_child_, line.data() + off, line.size() - off);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw AdapterError("adapter process is not accepting input");
    off += static_cast<std::size_t>(n);
  }
  const auto reply = read_line();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(reply);
  } catch (const nlohmann::json::parse_error& e) {
    throw AdapterError(std::string("adapter replied with malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw AdapterError("adapter reply is not a JSON object");
  if (auto it = j.find("error"); it != j.end()) throw AdapterError("adapter error: " + it->dump());
  return j;
}

HttpTransport::HttpTransport(const std::string& url) {
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0) throw ConfigError("adapter URL must start with http://");
  auto rest = url.substr(scheme.size());
  const auto slash = rest.find('/');
  path_ = slash == std::string::npos ? "/" : rest.substr(slash);
  auto hostport = rest.substr(0, slash);
  const auto colon = hostport.rfind(':');
  if (colon != std::string::npos) {
    host_ = hostport.substr(0, colon);
    try {
      port_ = std::stoi(hostport.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad port in adapter URL " + url);
    }
  } else {
    host_ = hostport;
  }
  if (host_.empty()) throw ConfigError("adapter URL has no host");
}

nlohmann::json HttpTransport::call(const nlohmann::json& request) {
  httplib::Client cli(host_, port_);
  cli.set_read_timeout(120, 0);
  auto res = cli.Post(path_, request.dump(), "application/json");
  if (!res) throw AdapterError("adapter HTTP request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw AdapterError("adapter HTTP status " + std::to_string(res->status) + ": " + res->body);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw AdapterError(std::string("adapter replied with malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw AdapterError("adapter reply is not a JSON object");
  return j;
}

std::unique_ptr<JsonTransport> make_transport(const std::string& spec) {
  if (spec.rfind("http://", 0) == 0) return std::make_unique<HttpTransport>(spec);
  if (spec.rfind("cmd:", 0) == 0) return std::make_unique<SubprocessTransport>(split_ws(spec.substr(4)));
  throw ConfigError("adapter endpoint must be 'cmd:<command>' or 'http://host:port/path', got '" + spec + "'");
}

}  // namespace genderalt
