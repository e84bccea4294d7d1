#pragma once

#include <memory>
#include <string>
#include <thread>

#include "shuttleplan/service.hpp"

namespace shuttleplan {

// Serves a PlanService over HTTP. Every path is forwarded to
// PlanService::handle; the If-Match header carries the expected revision and
// responses carry the current one as ETag.
class HttpServer {
 public:
  explicit HttpServer(PlanService& service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds and returns the port; port 0 picks a free one.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void listen();
  // listen() on a background thread.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
};

}  // namespace shuttleplan
