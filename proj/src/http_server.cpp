#include "shuttleplan/http_server.hpp"

#include "csv.hpp"
#include "httplib.h"

namespace shuttleplan {

struct HttpServer::Impl {
  PlanService* service;
  httplib::Server server;
};

namespace {

std::optional<long long> parse_if_match(const std::string& h) {
  std::string_view v = csv::trim(h);
  if (v.substr(0, 2) == "W/") v.remove_prefix(2);
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
  return csv::to_int(v);
}

}  // namespace

HttpServer::HttpServer(PlanService& service) : impl_(std::make_unique<Impl>()) {
  impl_->service = &service;
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    ApiRequest r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.params) r.query[k] = v;
    r.body = req.body;
    if (req.has_header("If-Match")) {
      r.if_match = parse_if_match(req.get_header_value("If-Match"));
      if (!r.if_match) {
        res.status = 400;
        res.set_content(R"({"error":"bad_request","message":"If-Match must carry a revision number"})",
                        "application/json");
        return;
      }
    }
    const ApiResponse out = impl_->service->handle(r);
    res.status = out.status;
    if (out.revision) res.set_header("ETag", "\"" + std::to_string(*out.revision) + "\"");
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Expose-Headers", "ETag");
    res.set_content(out.body, out.content_type);
  };
  const char* any = R"(/.*)";
  impl_->server.Get(any, handler);
  impl_->server.Post(any, handler);
  impl_->server.Put(any, handler);
  impl_->server.Delete(any, handler);
  impl_->server.Options(any, [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, If-Match");
    res.status = 204;
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::start() {
  thread_ = std::thread([this] { listen(); });
  impl_->server.wait_until_ready();
}

void HttpServer::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace shuttleplan
