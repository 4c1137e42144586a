#pragma once

// Transports for external model adapters: one JSON request, one JSON response.

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace genderalt {

class JsonTransport {
 public:
  virtual ~JsonTransport() = default;
  /// Throws AdapterError on transport failure or a non-object reply.
  virtual nlohmann::json call(const nlohmann::json& request) = 0;
};

/// Long-lived child process speaking line-delimited JSON on stdin/stdout. Calls are
/// serialized; the child is terminated on destruction.
class SubprocessTransport final : public JsonTransport {
 public:
  explicit SubprocessTransport(std::vector<std::string> argv);
  ~SubprocessTransport() override;
  SubprocessTransport(const SubprocessTransport&) = delete;
  SubprocessTransport& operator=(const SubprocessTransport&) = delete;

  nlohmann::json call(const nlohmann::json& request) override;

 private:
  std::string read_line();

  std::mutex mu_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

/// HTTP POST of the request body to a fixed URL ("http://host:port/path").
class HttpTransport final : public JsonTransport {
 public:
  explicit HttpTransport(const std::string& url);
  nlohmann::json call(const nlohmann::json& request) override;

 private:
  std::string host_;
  int port_ = 80;
  std::string path_;
};

/// "cmd:<shell words>" or "http://..." -> transport.
std::unique_ptr<JsonTransport> make_transport(const std::string& spec);

}  // namespace genderalt
