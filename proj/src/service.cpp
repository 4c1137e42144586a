#include "genderalt/service.hpp"

#include <atomic>
#include <charconv>

#include <httplib.h>

#include "genderalt/derive.hpp"

namespace genderalt {

struct Service::Server {
  httplib::Server http;
  std::atomic<bool> done{false};
  std::atomic<int> port{0};
};

namespace {

HttpResponse error_response(int status, const std::string& message) { return {status, {{"error", message}}}; }

std::optional<std::size_t> parse_index(const std::string& s) {
  std::size_t v = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || s.empty()) return std::nullopt;
  return v;
}

std::string entity_name(const GTransRecord& rec, std::size_t e) {
  return rec.source.tokens.at(rec.source.entities.at(e).head_index);
}

}  // namespace

Service::Service(std::vector<GTransRecord> corpus, InflectionLexicon lex, std::shared_ptr<const NgramModel> model)
    : corpus_(std::move(corpus)), lex_(std::move(lex)), model_(std::move(model)), server_(std::make_shared<Server>()) {}

HttpResponse Service::list_records() const {
  auto out = nlohmann::json::array();
  for (std::size_t i = 0; i < corpus_.size(); ++i)
    out.push_back({{"id", std::to_string(i)}, {"src", corpus_[i].source.tokens}});
  return {200, out};
}

HttpResponse Service::get_record(const std::string& id) const {
  auto idx = parse_index(id);
  if (!idx || *idx >= corpus_.size()) return error_response(404, "unknown record id '" + id + "'");
  return {200, to_json(corpus_[*idx])};
}

HttpResponse Service::derive_endpoint(const nlohmann::json& req) const {
  if (!req.is_object()) return error_response(400, "request body must be a JSON object");
  auto id_it = req.find("id");
  if (id_it == req.end()) return error_response(400, "missing 'id'");
  const std::string id = id_it->is_string() ? id_it->get<std::string>() : id_it->dump();
  auto idx = parse_index(id);
  if (!idx || *idx >= corpus_.size()) return error_response(404, "unknown record id '" + id + "'");
  const auto& rec = corpus_[*idx];

  GenderAssignment g;
  auto a_it = req.find("assignment");
  if (a_it != req.end() && !a_it->is_null()) {
    if (!a_it->is_object()) return error_response(400, "'assignment' must be an object");
    for (const auto& [key, value] : a_it->items()) {
      if (!value.is_string()) return error_response(422, "assignment for '" + key + "' must be \"M\" or \"F\"");
      Gender gender;
      try {
        gender = parse_gender(value.get<std::string>());
      } catch (const Error&) {
        return error_response(422, "assignment for '" + key + "' must be \"M\" or \"F\"");
      }
      std::optional<std::size_t> entity = parse_index(key);
      if (entity && *entity >= rec.source.entities.size()) entity.reset();
      if (!entity) {
        const auto want = lowercase(key);
        for (std::size_t e = 0; e < rec.source.entities.size(); ++e) {
          if (lowercase(entity_name(rec, e)) != want) continue;
          if (entity) return error_response(422, "entity name '" + key + "' is ambiguous; use its index");
          entity = e;
        }
      }
      if (!entity) return error_response(422, "record has no entity '" + key + "'");
      g[*entity] = gender;
    }
  }
  try {
    const auto tgt = derive(rec.target, rec.alignments, g);
    return {200, {{"tgt", tgt}, {"text", join(tgt)}}};
  } catch (const MissingAssignment& e) {
    return {422,
            {{"error", "missing gender assignment for entity " + std::to_string(e.entity()) + " (" +
                           entity_name(rec, e.entity()) + ")"},
             {"entity", e.entity()},
             {"name", entity_name(rec, e.entity())}}};
  }
}

HttpResponse Service::augment_endpoint(const nlohmann::json& req) const {
  if (!req.is_object() || !req.contains("src") || !req.contains("yB"))
    return error_response(400, "request needs 'src' and 'yB'");
  try {
    const auto in = augment_input_from_json(req);
    if (!model_) return error_response(503, "service has no language model for augmentation");
    const LatticeTransformer transformer(lex_, model_);
    const HeuristicAligner aligner;
    const auto result = augment(in.src, in.y_b, detector_, transformer, aligner, lex_);
    if (const auto* rec = std::get_if<GTransRecord>(&result)) return {200, {{"status", "record"}, {"record", to_json(*rec)}}};
    const auto& p = std::get<Passthrough>(result);
    return {200, {{"status", "passthrough"}, {"reason", to_string(p.reason)}, {"record", to_json(p.as_record())}}};
  } catch (const InvalidRecord& e) {
    return error_response(422, e.what());
  }
}

HttpResponse Service::handle(const std::string& method, const std::string& path, const std::string& body) const {
  try {
    if (method == "GET" && path == "/records") return list_records();
    const std::string prefix = "/records/";
    if (method == "GET" && path.rfind(prefix, 0) == 0) return get_record(path.substr(prefix.size()));
    if (method == "POST" && (path == "/derive" || path == "/augment")) {
      nlohmann::json req;
      try {
        req = nlohmann::json::parse(body);
      } catch (const nlohmann::json::parse_error& e) {
        return error_response(400, std::string("malformed JSON body: ") + e.what());
      }
      return path == "/derive" ? derive_endpoint(req) : augment_endpoint(req);
    }
    if (path == "/records" || path.rfind(prefix, 0) == 0 || path == "/derive" || path == "/augment")
      return error_response(405, "method " + method + " not allowed on " + path);
    return error_response(404, "no endpoint " + path);
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
}

void Service::listen(const std::string& host, int port) {
  auto server = server_;
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    const auto r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server->http.Get(R"(/.*)", route);
  server->http.Post(R"(/.*)", route);
  server->http.Put(R"(/.*)", route);
  server->http.Delete(R"(/.*)", route);
  if (port == 0) {
    port = server->http.bind_to_any_port(host);
  } else if (!server->http.bind_to_port(host, port)) {
    port = -1;
  }
  const bool ok = port > 0;
  server->port = ok ? port : 0;
  server->done = !ok;
  if (!ok) throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
  server->http.listen_after_bind();
  server->done = true;
}

int Service::bound_port() const { return server_->port; }

void Service::stop() { server_->http.stop(); }

bool Service::wait_until_ready() const {
  while (!server_->http.is_running() && !server_->done) std::this_thread::yield();
  return server_->http.is_running();
}

}  // namespace genderalt
