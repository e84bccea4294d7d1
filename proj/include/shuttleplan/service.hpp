#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

namespace shuttleplan {

struct ApiRequest {
  std::string method;  // GET, POST, PUT, DELETE
  std::string path;    // without query string
  std::map<std::string, std::string> query;
  std::string body;
  std::optional<long long> if_match;
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
  std::optional<long long> revision;  // sent back as ETag
};

struct ServiceConfig {
  std::filesystem::path data_dir = ".";
  double walk_speed_mps = 1.2;
  double threshold_default_m = 1000.0;
  // Append-only event log per session; empty disables persistence.
  std::filesystem::path session_log_dir;
  std::function<void(const std::string&)> log;
};

struct Session;

// The planning loop behind the JSON-over-HTTP contract. Requests for
// different sessions run in parallel; requests within one session are
// serialized. Every successful mutation bumps the session revision; a
// request carrying If-Match with a stale revision gets 409.
class PlanService {
 public:
  explicit PlanService(ServiceConfig config);
  ~PlanService();

  PlanService(const PlanService&) = delete;
  PlanService& operator=(const PlanService&) = delete;

  ApiResponse handle(const ApiRequest& request);

  // Rebuilds sessions from the event logs in session_log_dir. Returns the
  // number restored; logs that fail to replay are skipped and reported.
  std::size_t restore_sessions();

  std::size_t session_count() const;
  const ServiceConfig& config() const { return config_; }

 private:
  ApiResponse dispatch(const ApiRequest& request, bool replaying, const std::string& forced_id);
  ApiResponse create_session(const ApiRequest& request, bool replaying, const std::string& forced_id);
  std::shared_ptr<Session> find(const std::string& id) const;
  void append_event(Session& s, const ApiRequest& request);

  ServiceConfig config_;
  mutable std::shared_mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

}  // namespace shuttleplan
