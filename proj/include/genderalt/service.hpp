#pragma once

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "genderalt/corpus.hpp"
#include "genderalt/pipeline.hpp"

namespace genderalt {

struct HttpResponse {
  int status = 200;
  nlohmann::json body;
};

/// Read-only HTTP API over a loaded corpus. Request handling is independent of the
/// socket layer so the endpoints can be exercised without a server.
///
///   GET  /records        -> [{"id", "src"}]
///   GET  /records/{id}   -> G-Trans record JSON
///   POST /derive         {"id", "assignment": {entity: "M"|"F"}} -> {"tgt", "text"}
///   POST /augment        {"src", "yB"} -> {"status", "record"}
///
/// Assignment keys are either entity-list indices ("1") or head words ("boss").
class Service {
 public:
  Service(std::vector<GTransRecord> corpus, InflectionLexicon lex, std::shared_ptr<const NgramModel> model);

  HttpResponse handle(const std::string& method, const std::string& path, const std::string& body) const;

  /// Blocks serving on host:port until stop() is called from another thread. Port 0
  /// picks a free port, reported by bound_port() once ready.
  void listen(const std::string& host, int port);
  int bound_port() const;
  void stop();
  /// True once the socket is bound (or listen failed).
  bool wait_until_ready() const;

  const std::vector<GTransRecord>& corpus() const noexcept { return corpus_; }

 private:
  HttpResponse list_records() const;
  HttpResponse get_record(const std::string& id) const;
  HttpResponse derive_endpoint(const nlohmann::json& req) const;
  HttpResponse augment_endpoint(const nlohmann::json& req) const;

  std::vector<GTransRecord> corpus_;
  InflectionLexicon lex_;
  std::shared_ptr<const NgramModel> model_;
  RuleDetector detector_;
  struct Server;
  std::shared_ptr<Server> server_;
};

}  // namespace genderalt
