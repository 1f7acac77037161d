#pragma once

#include <map>
#include <memory>
#include <string>

namespace spcc {

class ControlCenter;

// Transport-neutral request. Header names are matched case-insensitively;
// `path` and `query` values are already percent-decoded.
struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;
  std::string body;

  std::string header(const std::string& name) const;
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// Routes of the control center:
//   GET   /projects/{id}
//   PUT   /projects/{id}
//   POST  /projects/{id}/measurements?source={sourceId}
//   GET   /projects/{id}/views?role={role}
//   GET   /projects/{id}/views/{viewId}/drill?step={path}
//   PATCH /projects/{id}/catena/functions/{fid}
//   GET   /projects/{id}/alerts?since={version}
//   POST  /projects/{id}/package
//   GET   /projects/{id}/history
// Every route but PUT needs `Authorization: Bearer <token>` for a token of
// the project. PUT needs the admin token when one is configured.
class HttpApi {
 public:
  explicit HttpApi(ControlCenter& center, std::string admin_token = {});
  ~HttpApi();

  ApiResponse handle(const ApiRequest& request);

  // Blocks until stop() is called or the socket fails. Returns false if the
  // address could not be bound.
  bool serve(const std::string& host, int port);
  void stop();

 private:
  struct Server;

  ControlCenter& center_;
  std::string admin_token_;
  std::unique_ptr<Server> server_;
};

}  // namespace spcc
