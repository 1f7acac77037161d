#include "spcc/http_api.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "spcc/error.hpp"
#include "spcc/hashing.hpp"
#include "spcc/service.hpp"

namespace spcc {

using nlohmann::json;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < path.size()) {
    auto next = path.find('/', pos);
    if (next == std::string::npos) next = path.size();
    if (next > pos) out.push_back(path.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

ApiResponse json_response(int status, const json& body) {
  return {status, "application/json", body.dump()};
}

ApiResponse error_response(int status, const std::string& code, const std::string& message) {
  return json_response(status, {{"error", code}, {"message", message}});
}

int status_for(const std::string& code) {
  if (code == "InvalidToken") return 401;
  if (code == "AccessDenied") return 403;
  if (code.rfind("Unknown", 0) == 0) return 404;
  if (code == "DuplicateProject" || code == "DuplicateBatch" || code == "NoResults") return 409;
  if (code == "SchemaViolation" || code == "ValidationFailed" || code == "ParseError" ||
      code == "EncodingError" || code == "PreconditionViolation" || code == "EmptyField") {
    return 422;
  }
  return 500;
}

struct BadRequest {
  std::string message;
};

std::uint64_t parse_version(const std::string& text) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) throw BadRequest{"'since' must be a non-negative integer"};
  return v;
}

json parse_body(const std::string& body) {
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded()) throw BadRequest{"request body is not valid JSON"};
  return doc;
}

}  // namespace

std::string ApiRequest::header(const std::string& name) const {
  const std::string key = lower(name);
  for (const auto& [k, v] : headers) {
    if (lower(k) == key) return v;
  }
  return {};
}

struct HttpApi::Server {
  httplib::Server http;
};

HttpApi::HttpApi(ControlCenter& center, std::string admin_token)
    : center_(center), admin_token_(std::move(admin_token)), server_(std::make_unique<Server>()) {}

HttpApi::~HttpApi() = default;

ApiResponse HttpApi::handle(const ApiRequest& req) {
  const auto seg = split_path(req.path);
  if (seg.size() < 2 || seg[0] != "projects") return error_response(404, "NotFound", "no route for " + req.path);
  const std::string& project = seg[1];
  const std::string& method = req.method;

  auto bearer = [&]() -> std::string {
    const std::string auth = req.header("Authorization");
    const std::string prefix = "bearer ";
    if (auth.size() <= prefix.size() || lower(auth.substr(0, prefix.size())) != prefix) return {};
    return auth.substr(prefix.size());
  };
  auto principal = [&]() {
    const std::string token = bearer();
    if (token.empty()) throw InvalidToken("missing bearer token");
    return center_.authenticate(project, token);
  };
  auto method_not_allowed = [&]() { return error_response(405, "MethodNotAllowed", method + " " + req.path); };

  try {
    if (seg.size() == 2) {
      if (method == "PUT") {
        if (!admin_token_.empty() && !constant_time_equal(bearer(), admin_token_)) {
          throw InvalidToken("registration needs the admin token");
        }
        const json bundle = parse_body(req.body);
        center_.register_project(registration_from_json(project, bundle), &bundle);
        return json_response(201, center_.project_info(project));
      }
      if (method == "GET") {
        principal();
        return json_response(200, center_.project_info(project));
      }
      return method_not_allowed();
    }

    const std::string& resource = seg[2];
    if (resource == "measurements" && seg.size() == 3) {
      if (method != "POST") return method_not_allowed();
      principal();
      const auto format = record_format_from_content_type(req.header("Content-Type"));
      if (!format) throw BadRequest{"Content-Type must be text/csv or application/x-ndjson"};
      std::string source;
      if (auto it = req.query.find("source"); it != req.query.end()) source = it->second;
      if (source.empty()) source = req.header("X-Source-Id");
      if (source.empty()) {
        const auto info = center_.project_info(project);
        for (const auto& s : info.at("sources")) {
          if (s.at("kind") == "api-push") {
            if (!source.empty()) throw BadRequest{"several api-push sources; name one with ?source="};
            source = s.at("source").get<std::string>();
          }
        }
        if (source.empty()) throw UnknownSource("project has no api-push source");
      }
      return json_response(200, to_json(center_.ingest(project, source, req.body, *format)));
    }

    if (resource == "views" && seg.size() == 3) {
      if (method != "GET") return method_not_allowed();
      const auto who = principal();
      std::optional<std::string_view> role;
      auto it = req.query.find("role");
      if (it != req.query.end() && !it->second.empty()) role = it->second;
      return json_response(200, to_json(center_.get_views(project, who, role)));
    }

    if (resource == "views" && seg.size() == 5 && seg[4] == "drill") {
      if (method != "GET") return method_not_allowed();
      const auto who = principal();
      auto it = req.query.find("step");
      if (it == req.query.end() || it->second.empty()) throw BadRequest{"query parameter 'step' is required"};
      return json_response(200, to_json(center_.drill(project, who, seg[3], it->second)));
    }

    if (resource == "catena" && seg.size() == 5 && seg[3] == "functions") {
      if (method != "PATCH") return method_not_allowed();
      const auto who = principal();
      const json body = parse_body(req.body);
      if (!body.is_object()) throw BadRequest{"body must be a JSON object of parameters"};
      ParamMap set;
      std::vector<std::string> unset;
      for (const auto& [name, value] : body.items()) {
        if (value.is_null()) {
          unset.push_back(name);
        } else {
          set[name] = param_from_json(value, "params." + name);
        }
      }
      const auto v = center_.update_parameters(project, who, seg[4], set, unset);
      const auto* f = v.catena.function(seg[4]);
      return json_response(200, {{"project_id", project},
                                 {"catena_version", v.version},
                                 {"instance_id", seg[4]},
                                 {"params", params_to_json(f->params)}});
    }

    if (resource == "alerts" && seg.size() == 3) {
      if (method != "GET") return method_not_allowed();
      const auto who = principal();
      std::uint64_t since = 0;
      if (auto it = req.query.find("since"); it != req.query.end() && !it->second.empty()) {
        since = parse_version(it->second);
      }
      return json_response(200, to_json(center_.list_alerts(project, who, since)));
    }

    if (resource == "package" && seg.size() == 3) {
      if (method != "POST") return method_not_allowed();
      const auto pkg = center_.package(project, principal());
      json outcome = json::object();
      for (const auto& [metric, counts] : pkg.outcome) outcome[metric] = counts;
      return json_response(201, {{"package_id", pkg.package_id},
                                 {"project_id", project},
                                 {"catena_version", pkg.catena.version},
                                 {"created_at", pkg.created_at},
                                 {"outcome", outcome}});
    }

    if (resource == "history" && seg.size() == 3) {
      if (method != "GET") return method_not_allowed();
      principal();
      json versions = json::array();
      for (const auto& v : center_.history(project)) versions.push_back(to_json(v));
      return json_response(200, {{"project_id", project}, {"versions", versions}});
    }

    return error_response(404, "NotFound", "no route for " + req.path);
  } catch (const BadRequest& e) {
    return error_response(400, "BadRequest", e.message);
  } catch (const ValidationFailed& e) {
    return json_response(422, {{"error", e.code()}, {"message", e.what()}, {"findings", e.findings()}});
  } catch (const Error& e) {
    return error_response(status_for(e.code()), e.code(), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "InternalError", e.what());
  }
}

bool HttpApi::serve(const std::string& host, int port) {
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    ApiRequest r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.params) r.query.emplace(k, v);
    for (const auto& [k, v] : req.headers) r.headers.emplace(k, v);
    r.body = req.body;
    const auto out = handle(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  const std::string any = R"(/.*)";
  server_->http.Get(any, forward);
  server_->http.Put(any, forward);
  server_->http.Post(any, forward);
  server_->http.Patch(any, forward);
  server_->http.Delete(any, forward);
  return server_->http.listen(host, port);
}

void HttpApi::stop() { server_->http.stop(); }

}  // namespace spcc
