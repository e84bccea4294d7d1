#include "shuttleplan/service.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "csv.hpp"
#include "shuttleplan/errors.hpp"
#include "shuttleplan/exports.hpp"
#include "shuttleplan/route.hpp"
#include "shuttleplan/voronoi.hpp"

namespace shuttleplan {
namespace fs = std::filesystem;

namespace {

struct ApiError {
  int status;
  std::string code;
  std::string message;
};

[[noreturn]] void bad_request(const std::string& message) { throw ApiError{400, "bad_request", message}; }

ApiResponse json_response(int status, const Json& body, std::optional<long long> revision = std::nullopt) {
  ApiResponse r;
  r.status = status;
  r.body = body.dump();
  r.revision = revision;
  return r;
}

ApiResponse error_response(int status, const std::string& code, const std::string& message) {
  Json j;
  j["error"] = code;
  j["message"] = message;
  return json_response(status, j);
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

nlohmann::json parse_body(const std::string& body) {
  if (body.empty()) return nlohmann::json::object();
  try {
    auto j = nlohmann::json::parse(body);
    if (!j.is_object()) bad_request("request body must be a JSON object");
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    bad_request(std::string("malformed JSON body: ") + e.what());
  }
}

long long query_int(const ApiRequest& req, const std::string& key, long long fallback) {
  auto it = req.query.find(key);
  if (it == req.query.end() || it->second.empty()) return fallback;
  auto v = csv::to_int(it->second);
  if (!v) bad_request("query parameter '" + key + "' must be an integer");
  return *v;
}

int parse_int_segment(const std::string& s, const char* what) {
  auto v = csv::to_int(s);
  if (!v || *v < 0 || *v > 1'000'000) throw ApiError{404, "not_found", std::string("no such ") + what + " '" + s + "'"};
  return static_cast<int>(*v);
}

double body_number(const nlohmann::json& body, const char* key, std::optional<double> fallback = std::nullopt) {
  if (!body.contains(key) || body[key].is_null()) {
    if (fallback) return *fallback;
    bad_request(std::string("missing field '") + key + "'");
  }
  if (!body[key].is_number()) bad_request(std::string("field '") + key + "' must be a number");
  return body[key].get<double>();
}

double body_time(const nlohmann::json& body, const char* key) {
  if (!body.contains(key)) bad_request(std::string("missing field '") + key + "'");
  const auto& v = body[key];
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) bad_request(std::string("field '") + key + "' must be \"HH:MM\" or seconds");
  const std::string s = v.get<std::string>();
  try {
    if (s.find('T') != std::string::npos || s.size() > 10) return time_of_day_s(parse_iso_timestamp(s));
    return parse_time_of_day(s);
  } catch (const PlanError&) {
    bad_request(std::string("field '") + key + "' is not a valid time");
  }
}

std::string random_id() {
  std::random_device rd;
  std::uniform_int_distribution<unsigned> hex(0, 15);
  std::string id;
  for (int i = 0; i < 24; ++i) id.push_back("0123456789abcdef"[hex(rd)]);
  return id;
}

std::optional<GeoPoint> first_origin(const fs::path& trips) {
  std::ifstream in(trips);
  std::string line;
  if (!csv::read_line(in, line, true)) return std::nullopt;
  while (csv::read_line(in, line, false)) {
    auto f = csv::split(line);
    if (!f || f->size() < 5) continue;
    auto lat = csv::to_double((*f)[3]);
    auto lon = csv::to_double((*f)[4]);
    if (lat && lon) return GeoPoint{*lat, *lon};
  }
  return std::nullopt;
}

struct Candidate {
  std::string label;
  double departure_s = 0.0;
  double dwell_s = kDefaultDwellS;
  ShuttleRoute route;
};

}  // namespace

struct Session {
  std::mutex mu;
  std::string id;
  long long revision = 0;
  Json dataset;

  GeoPoint workplace;
  std::vector<TripRecord> records;
  std::vector<RejectedRow> rejects;
  std::vector<DropOffSpot> spots;
  std::vector<int> record_spot;
  std::unique_ptr<RoadNetwork> network;
  std::unique_ptr<RoadRouter> walk_router;
  std::unique_ptr<RoadRouter> drive_router;
  WalkMatrix walk;
  TravelTimeProfiles profiles;
  SpotWeights weights;

  std::optional<int> k;
  std::uint64_t seed = 0;
  bool weighted = true;
  std::optional<DirectionalClustering> directional;
  std::vector<std::vector<TripRecord>> direction_trips;
  std::optional<std::vector<std::vector<RegionalCluster>>> regional;
  double threshold_m = kDefaultRegionThresholdM;
  std::optional<VoronoiGrid> voronoi;
  std::string voronoi_error;
  std::map<std::pair<int, int>, int> overrides;
  std::map<int, std::vector<Candidate>> candidates;

  std::ofstream log;

  PlanningContext context() const {
    PlanningContext ctx;
    ctx.workplace = workplace;
    ctx.spots = spots;
    ctx.walk = &walk;
    ctx.profiles = &profiles;
    ctx.drive_router = drive_router.get();
    ctx.walk_router = walk_router.get();
    ctx.weights = weights;
    return ctx;
  }

  void clear_clustering() {
    directional.reset();
    direction_trips.clear();
    clear_regions();
  }

  void clear_regions() {
    regional.reset();
    voronoi.reset();
    voronoi_error.clear();
    overrides.clear();
    candidates.clear();
  }

  const DirectionalClustering& need_directional() const {
    if (!directional) throw ApiError{422, "k_not_set", "choose the number of directions first"};
    return *directional;
  }

  const std::vector<RegionalCluster>& need_regions(int d) const {
    need_directional();
    if (!regional) throw ApiError{422, "regions_not_built", "build the regional clusters first"};
    if (d < 0 || d >= static_cast<int>(regional->size())) {
      throw ApiError{404, "not_found", "no direction " + std::to_string(d)};
    }
    return (*regional)[static_cast<std::size_t>(d)];
  }

  std::map<int, int> direction_overrides(int d) const {
    std::map<int, int> out;
    for (const auto& [key, spot] : overrides) {
      if (key.first == d) out[key.second] = spot;
    }
    return out;
  }

  ShuttleRoute build_route(int d, const std::string& label, double departure_s, double dwell_s) const {
    RouteOptions opts;
    opts.dwell_s = dwell_s;
    ShuttleRoute r = string_route(context(), d, need_regions(d), direction_overrides(d), departure_s, opts);
    r.label = label;
    return r;
  }

  RouteMetrics metrics_of(const ShuttleRoute& r) const {
    return route_metrics(r, need_regions(r.direction_id), direction_trips[static_cast<std::size_t>(r.direction_id)],
                         walk, weights);
  }
};

namespace {

Json route_json(const ShuttleRoute& r) {
  Json j;
  j["direction_id"] = r.direction_id;
  j["label"] = r.label;
  j["departure_time"] = format_time_of_day(r.departure_s);
  j["dwell_s"] = r.dwell_s;
  Json stops = Json::array();
  for (std::size_t i = 0; i < r.stops.size(); ++i) {
    const auto& s = r.stops[i];
    stops.push_back({{"seq", i + 1},
                     {"region_id", s.region_id},
                     {"spot_id", s.spot_id},
                     {"name", s.name},
                     {"lat", s.location.lat},
                     {"lon", s.location.lon}});
  }
  j["stops"] = std::move(stops);
  Json legs = Json::array();
  for (const auto& l : r.legs) {
    legs.push_back({{"depart", format_time_of_day(l.depart_s)},
                    {"depart_s", l.depart_s},
                    {"duration_s", l.duration_s},
                    {"distance_m", l.distance_m},
                    {"extrapolated", l.extrapolated},
                    {"estimated", l.estimated}});
  }
  j["legs"] = std::move(legs);
  return j;
}

Json timetable_json(const Timetable& t) {
  Json a = Json::array();
  for (std::size_t i = 0; i < t.entries.size(); ++i) {
    const auto& e = t.entries[i];
    a.push_back({{"seq", i + 1},
                 {"region_id", e.region_id},
                 {"spot_id", e.spot_id},
                 {"name", e.name},
                 {"arrival", format_time_of_day(e.arrival_s)},
                 {"arrival_s", e.arrival_s},
                 {"cumulative_distance_m", e.cumulative_distance_m}});
  }
  return a;
}

Json candidate_json(const Session& s, const Candidate& c) {
  Json j;
  j["label"] = c.label;
  j["departure_time"] = format_time_of_day(c.departure_s);
  j["route"] = route_json(c.route);
  j["timetable"] = timetable_json(timetable(c.route));
  j["metrics"] = route_metrics_json(s.metrics_of(c.route));
  j["warnings"] = warnings_json(check_criteria(c.route, s.workplace));
  return j;
}

Json regions_json(const std::vector<std::vector<RegionalCluster>>& regional) {
  Json a = Json::array();
  for (const auto& dir : regional) {
    Json d = Json::array();
    for (const auto& r : dir) {
      d.push_back({{"direction_id", r.direction_id},
                   {"region_id", r.region_id},
                   {"seed_spot_id", r.seed_spot_id},
                   {"member_spot_ids", r.member_spot_ids},
                   {"order_total", r.order_total}});
    }
    a.push_back(std::move(d));
  }
  return a;
}

fs::path resolve_data_path(const fs::path& data_dir, const std::string& p) {
  fs::path path(p);
  const fs::path base = fs::weakly_canonical(data_dir);
  const fs::path full = fs::weakly_canonical(path.is_absolute() ? path : base / path);
  auto [b, f] = std::mismatch(base.begin(), base.end(), full.begin(), full.end());
  if (b != base.end()) throw ApiError{400, "path_outside_data_dir", "dataset path escapes the data directory: " + p};
  return full;
}

}  // namespace

PlanService::PlanService(ServiceConfig config) : config_(std::move(config)) {
  if (!config_.session_log_dir.empty()) fs::create_directories(config_.session_log_dir);
}

PlanService::~PlanService() = default;

std::size_t PlanService::session_count() const {
  std::shared_lock lock(sessions_mu_);
  return sessions_.size();
}

std::shared_ptr<Session> PlanService::find(const std::string& id) const {
  std::shared_lock lock(sessions_mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ApiError{404, "unknown_session", "no session '" + id + "'"};
  return it->second;
}

void PlanService::append_event(Session& s, const ApiRequest& req) {
  if (!s.log.is_open()) return;
  Json e;
  e["method"] = req.method;
  e["path"] = req.path;
  e["query"] = req.query;
  e["body"] = req.body;
  s.log << e.dump() << '\n';
  s.log.flush();
}

ApiResponse PlanService::handle(const ApiRequest& request) {
  try {
    return dispatch(request, false, "");
  } catch (const ApiError& e) {
    return error_response(e.status, e.code, e.message);
  } catch (const PlanError& e) {
    return error_response(422, e.code(), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal_error", e.what());
  }
}

ApiResponse PlanService::create_session(const ApiRequest& req, bool replaying, const std::string& forced_id) {
  const auto body = parse_body(req.body);
  auto str = [&](const char* key) -> std::optional<std::string> {
    if (!body.contains(key) || body[key].is_null()) return std::nullopt;
    if (!body[key].is_string()) bad_request(std::string("field '") + key + "' must be a string");
    return body[key].get<std::string>();
  };
  fs::path dir;
  if (auto d = str("dataset")) dir = *d;
  auto file = [&](const char* key, const char* def, bool required) -> std::optional<fs::path> {
    if (auto p = str(key)) return resolve_data_path(config_.data_dir, *p);
    if (!dir.empty()) {
      fs::path candidate = resolve_data_path(config_.data_dir, (dir / def).string());
      if (required || fs::exists(candidate)) return candidate;
    }
    if (required) bad_request(std::string("missing dataset file '") + key + "'");
    return std::nullopt;
  };
  const fs::path trips_path = *file("trips", "trips.csv", true);
  const fs::path nodes_path = *file("nodes", "nodes.csv", true);
  const fs::path edges_path = *file("edges", "edges.csv", true);
  const auto profiles_path = file("profiles", "profiles.json", false);
  const auto overrides_path = file("overrides", "overrides.csv", false);
  for (const auto& p : {trips_path, nodes_path, edges_path}) {
    if (!fs::exists(p)) throw ApiError{422, "missing_file", "dataset file not found: " + p.filename().string()};
  }

  auto s = std::make_shared<Session>();
  s->id = forced_id.empty() ? random_id() : forced_id;
  if (body.contains("workplace")) {
    const auto& w = body["workplace"];
    if (!w.is_object() || !w.contains("lat") || !w.contains("lon")) bad_request("workplace must be {lat, lon}");
    s->workplace = {body_number(w, "lat"), body_number(w, "lon")};
  } else if (auto o = first_origin(trips_path)) {
    s->workplace = *o;
  } else {
    throw ApiError{422, "empty_input", "trips file has no rows to infer the workplace from"};
  }
  if (!is_valid(s->workplace)) bad_request("workplace is out of range");
  const double radius = body_number(body, "unify_radius_m", kDefaultUnifyRadiusM);
  const double speed = body_number(body, "walk_speed_mps", config_.walk_speed_mps);
  TripParseOptions popts;
  popts.workplace_tolerance_m = body_number(body, "workplace_tolerance_m", popts.workplace_tolerance_m);

  std::ifstream trips_in(trips_path);
  auto parsed = parse_trips(trips_in, s->workplace, popts);
  s->records = std::move(parsed.records);
  s->rejects = std::move(parsed.rejects);
  if (overrides_path) {
    std::ifstream in(*overrides_path);
    apply_overrides(s->records, read_overrides(in));
  }
  if (s->records.empty()) throw ApiError{422, "empty_input", "no valid trip records"};
  auto uni = unify_locations(s->records, radius);
  s->spots = std::move(uni.spots);
  s->record_spot = std::move(uni.record_spot);
  s->weights = weights_of(s->spots);

  {
    std::ifstream n(nodes_path), e(edges_path);
    s->network = std::make_unique<RoadNetwork>(read_road_network(n, e));
  }
  if (profiles_path) {
    std::ifstream in(*profiles_path);
    s->profiles = read_profiles_json(in);
  }
  s->walk_router = std::make_unique<RoadRouter>(*s->network, TravelMode::kWalk, speed);
  s->drive_router = std::make_unique<RoadRouter>(*s->network, TravelMode::kDrive, speed);
  ProgressFn progress;
  if (config_.log) {
    progress = [this](std::size_t done, std::size_t total) {
      if (total >= 10 && done % (total / 10) != 0 && done != total) return;
      config_.log("walk matrix " + std::to_string(done) + "/" + std::to_string(total));
    };
  }
  s->walk = walk_shortest(*s->network, s->spots, speed, progress);
  s->threshold_m = config_.threshold_default_m;

  s->dataset = Json::object();
  for (const char* key : {"dataset", "trips", "nodes", "edges", "profiles", "overrides"}) {
    if (auto v = str(key)) s->dataset[key] = *v;
  }
  s->dataset["workplace"] = {{"lat", s->workplace.lat}, {"lon", s->workplace.lon}};
  s->dataset["unify_radius_m"] = radius;
  s->dataset["walk_speed_mps"] = speed;
  s->revision = 1;

  if (!config_.session_log_dir.empty()) {
    const fs::path log_path = config_.session_log_dir / (s->id + ".jsonl");
    s->log.open(log_path, std::ios::app);
    if (!replaying) append_event(*s, req);
  }

  Json out;
  out["session_id"] = s->id;
  out["revision"] = s->revision;
  out["records"] = s->records.size();
  out["spots"] = s->spots.size();
  Json rejects = Json::array();
  for (const auto& r : s->rejects) rejects.push_back({{"line", r.line}, {"reason", r.reason}});
  out["rejects"] = std::move(rejects);
  out["workplace"] = s->dataset["workplace"];
  const long long rev = s->revision;
  {
    std::unique_lock lock(sessions_mu_);
    sessions_[s->id] = s;
  }
  return json_response(201, out, rev);
}

ApiResponse PlanService::dispatch(const ApiRequest& req, bool replaying, const std::string& forced_id) {
  const auto seg = split_path(req.path);
  if (seg.empty() || seg[0] != "sessions") throw ApiError{404, "not_found", "no route " + req.path};
  if (seg.size() == 1) {
    if (req.method != "POST") throw ApiError{405, "method_not_allowed", req.method + " " + req.path};
    return create_session(req, replaying, forced_id);
  }

  auto s = find(seg[1]);
  std::lock_guard lock(s->mu);
  const std::vector<std::string> rest(seg.begin() + 2, seg.end());
  const std::string& m = req.method;
  auto is = [&](const char* method, std::initializer_list<const char*> parts) {
    if (m != method || rest.size() != parts.size()) return false;
    std::size_t i = 0;
    for (const char* p : parts) {
      if (std::string(p) != "*" && rest[i] != p) return false;
      ++i;
    }
    return true;
  };
  auto check_revision = [&] {
    if (!replaying && req.if_match && *req.if_match != s->revision) {
      throw ApiError{409, "revision_mismatch", "session is at revision " + std::to_string(s->revision)};
    }
  };
  auto commit = [&](Json out, int status = 200) {
    ++s->revision;
    out["revision"] = s->revision;
    if (!replaying) append_event(*s, req);
    return json_response(status, out, s->revision);
  };

  if (is("GET", {})) {
    Json out;
    out["session_id"] = s->id;
    out["revision"] = s->revision;
    out["dataset"] = s->dataset;
    out["records"] = s->records.size();
    out["spots"] = s->spots.size();
    out["k"] = s->k ? Json(*s->k) : Json(nullptr);
    out["regions_built"] = s->regional.has_value();
    return json_response(200, out, s->revision);
  }

  if (is("GET", {"silhouette"})) {
    const int n = static_cast<int>(s->spots.size());
    const long long kmin = query_int(req, "kmin", 2);
    const long long kmax = query_int(req, "kmax", std::min(12, n - 1));
    const long long seed = query_int(req, "seed", 0);
    DirectionalOptions opts;
    opts.weighted = query_int(req, "weighted", 1) != 0;
    const auto curve = silhouette_curve(s->spots, s->workplace, static_cast<int>(kmin), static_cast<int>(kmax),
                                        static_cast<std::uint64_t>(seed), opts);
    Json out;
    Json pts = Json::array();
    for (const auto& p : curve.points) pts.push_back({{"k", p.k}, {"silhouette", p.silhouette}});
    out["points"] = std::move(pts);
    out["best_k"] = curve.best_k;
    return json_response(200, out, s->revision);
  }

  if (is("PUT", {"k"})) {
    check_revision();
    const auto body = parse_body(req.body);
    const double kv = body_number(body, "k");
    if (kv != static_cast<int>(kv)) bad_request("k must be an integer");
    const double seedv = body_number(body, "seed", 0.0);
    if (seedv < 0 || seedv != static_cast<double>(static_cast<std::uint64_t>(seedv))) {
      bad_request("seed must be a non-negative integer");
    }
    DirectionalOptions opts;
    if (body.contains("weighted")) {
      if (!body["weighted"].is_boolean()) bad_request("weighted must be a boolean");
      opts.weighted = body["weighted"].get<bool>();
    }
    auto dc = cluster_directions(s->spots, s->workplace, static_cast<int>(kv), static_cast<std::uint64_t>(seedv), opts);
    s->clear_clustering();
    s->k = static_cast<int>(kv);
    s->seed = static_cast<std::uint64_t>(seedv);
    s->weighted = opts.weighted;
    s->directional = std::move(dc);
    for (int d = 0; d < s->directional->k; ++d) {
      s->direction_trips.push_back(trips_in_direction(s->records, s->record_spot, *s->directional, d));
    }
    Json out;
    out["k"] = *s->k;
    out["seed"] = s->seed;
    out["weighted"] = s->weighted;
    Json dirs = Json::array();
    for (int d = 0; d < s->directional->k; ++d) {
      long long orders = 0;
      const auto members = s->directional->members(d);
      for (int id : members) orders += s->spots[static_cast<std::size_t>(id)].order_count;
      dirs.push_back({{"direction_id", d},
                      {"centroid_deg", s->directional->centroid_deg[static_cast<std::size_t>(d)]},
                      {"spot_ids", members},
                      {"order_total", orders},
                      {"record_count", s->direction_trips[static_cast<std::size_t>(d)].size()}});
    }
    out["directions"] = std::move(dirs);
    Json stats = Json::array();
    for (const auto& a : angle_stats(*s->directional, s->spots)) {
      stats.push_back({{"direction_id", a.direction_id},
                       {"center", a.center},
                       {"min", a.min},
                       {"q1", a.q1},
                       {"median", a.median},
                       {"q3", a.q3},
                       {"max", a.max},
                       {"n", a.n},
                       {"order_total", a.order_total}});
    }
    out["angle_stats"] = std::move(stats);
    Json assign = Json::array();
    for (std::size_t i = 0; i < s->directional->spot_ids.size(); ++i) {
      assign.push_back({{"spot_id", s->directional->spot_ids[i]},
                        {"direction_id", s->directional->direction[i]},
                        {"bearing_deg", s->directional->bearing_deg[i]}});
    }
    out["assignments"] = std::move(assign);
    return commit(std::move(out));
  }

  if (is("POST", {"regions"})) {
    check_revision();
    const auto& dc = s->need_directional();
    const auto body = parse_body(req.body);
    const double threshold = body_number(body, "threshold_m", config_.threshold_default_m);
    auto regional = regions_by_direction(dc, s->spots, s->walk, threshold);
    s->clear_regions();
    s->threshold_m = threshold;
    s->regional = std::move(regional);
    try {
      s->voronoi = build_voronoi(s->spots, dc, *s->regional);
    } catch (const PlanError& e) {
      s->voronoi_error = e.code();
    }
    Json out;
    out["threshold_m"] = threshold;
    out["regions"] = regions_json(*s->regional);
    if (s->voronoi) {
      out["voronoi"] = voronoi_geojson(*s->voronoi, s->spots, dc, *s->regional);
    } else {
      out["voronoi"] = nullptr;
      out["voronoi_error"] = s->voronoi_error;
    }
    return commit(std::move(out));
  }

  if (rest.size() >= 2 && rest[0] == "directions") {
    const int d = parse_int_segment(rest[1], "direction");
    if (is("GET", {"directions", "*", "histogram"})) {
      s->need_directional();
      if (d >= s->directional->k) throw ApiError{404, "not_found", "no direction " + rest[1]};
      const long long bin = query_int(req, "bin", 5);
      if (bin < 1 || bin > 1440) bad_request("bin must be between 1 and 1440 minutes");
      const auto& trips = s->direction_trips[static_cast<std::size_t>(d)];
      Json bins = Json::array();
      for (const auto& b : departure_histogram(trips, static_cast<int>(bin))) {
        bins.push_back({{"start", format_time_of_day_short(b.start_s)}, {"start_s", b.start_s}, {"count", b.count}});
      }
      Json out;
      out["direction_id"] = d;
      out["bin_min"] = bin;
      out["bins"] = std::move(bins);
      out["total"] = trips.size();
      return json_response(200, out, s->revision);
    }

    if (is("GET", {"directions", "*", "stops"})) {
      const auto& regions = s->need_regions(d);
      auto it = req.query.find("metric");
      MetricKey key;
      try {
        key = MetricKey::parse(it == req.query.end() ? "avg_dist" : it->second);
      } catch (const PlanError& e) {
        throw ApiError{400, e.code(), e.what()};
      }
      const auto ov = s->direction_overrides(d);
      Json out;
      out["direction_id"] = d;
      out["metric"] = key.name();
      out["lower_is_better"] = key.lower_is_better();
      Json regs = Json::array();
      for (const auto& r : regions) {
        const int rec = recommend_stop(r, s->walk, s->weights);
        auto o = ov.find(r.region_id);
        Json stops = Json::array();
        for (const auto& sm : rank_stops(r, s->walk, s->weights, key)) {
          Json j = stop_metrics_json(sm);
          j["name"] = s->spots[static_cast<std::size_t>(sm.spot_id)].name;
          j["order_count"] = s->spots[static_cast<std::size_t>(sm.spot_id)].order_count;
          j["value"] = key.value(sm);
          stops.push_back(std::move(j));
        }
        regs.push_back({{"region_id", r.region_id},
                        {"order_total", r.order_total},
                        {"recommended_spot_id", rec},
                        {"selected_spot_id", o == ov.end() ? rec : o->second},
                        {"stops", std::move(stops)}});
      }
      out["regions"] = std::move(regs);
      return json_response(200, out, s->revision);
    }

    if (is("PUT", {"directions", "*", "override"})) {
      check_revision();
      const auto& regions = s->need_regions(d);
      const auto body = parse_body(req.body);
      const double rv = body_number(body, "region_id");
      const int region_id = static_cast<int>(rv);
      const RegionalCluster* region = nullptr;
      for (const auto& r : regions) {
        if (r.region_id == region_id && rv == region_id) region = &r;
      }
      if (!region) throw ApiError{422, "unknown_region", "direction " + rest[1] + " has no region " + csv::format_double(rv)};
      std::optional<int> spot;
      if (body.contains("spot_id") && !body["spot_id"].is_null()) {
        const double sv = body_number(body, "spot_id");
        const auto& mem = region->member_spot_ids;
        if (sv != static_cast<int>(sv) || std::find(mem.begin(), mem.end(), static_cast<int>(sv)) == mem.end()) {
          throw ApiError{422, "spot_not_in_region", "spot not in region"};
        }
        spot = static_cast<int>(sv);
      }
      auto next = s->overrides;
      if (spot) {
        next[{d, region_id}] = *spot;
      } else {
        next.erase({d, region_id});
      }
      std::swap(s->overrides, next);
      std::vector<Candidate> rebuilt = s->candidates[d];
      try {
        for (auto& c : rebuilt) c.route = s->build_route(d, c.label, c.departure_s, c.dwell_s);
      } catch (...) {
        std::swap(s->overrides, next);
        throw;
      }
      s->candidates[d] = std::move(rebuilt);
      Json out;
      out["direction_id"] = d;
      out["region_id"] = region_id;
      out["spot_id"] = spot ? Json(*spot) : Json(nullptr);
      Json cands = Json::array();
      for (const auto& c : s->candidates[d]) cands.push_back(candidate_json(*s, c));
      out["candidates"] = std::move(cands);
      return commit(std::move(out));
    }

    if (is("GET", {"directions", "*", "candidates"})) {
      s->need_regions(d);
      Json cands = Json::array();
      for (const auto& c : s->candidates[d]) cands.push_back(candidate_json(*s, c));
      Json out;
      out["direction_id"] = d;
      out["candidates"] = std::move(cands);
      return json_response(200, out, s->revision);
    }

    if (is("POST", {"directions", "*", "candidates"})) {
      check_revision();
      s->need_regions(d);
      auto& list = s->candidates[d];
      if (list.size() >= kMaxCandidates) {
        throw ApiError{409, "candidate_limit", "at most " + std::to_string(kMaxCandidates) + " candidates per direction"};
      }
      const auto body = parse_body(req.body);
      Candidate c;
      c.departure_s = body_time(body, "departure_time");
      c.dwell_s = body_number(body, "dwell_s", kDefaultDwellS);
      if (c.dwell_s < 0) bad_request("dwell_s must be non-negative");
      if (body.contains("label") && body["label"].is_string()) {
        c.label = body["label"].get<std::string>();
      } else {
        c.label = format_time_of_day_short(c.departure_s);
      }
      for (const auto& other : list) {
        if (other.label == c.label) throw ApiError{409, "duplicate_label", "candidate '" + c.label + "' exists"};
      }
      c.route = s->build_route(d, c.label, c.departure_s, c.dwell_s);
      Json out;
      out["direction_id"] = d;
      out["candidate"] = candidate_json(*s, c);
      list.push_back(std::move(c));
      return commit(std::move(out), 201);
    }

    if (is("DELETE", {"directions", "*", "candidates", "*"})) {
      check_revision();
      s->need_regions(d);
      auto& list = s->candidates[d];
      auto it = std::find_if(list.begin(), list.end(), [&](const Candidate& c) { return c.label == rest[3]; });
      if (it == list.end()) throw ApiError{404, "not_found", "no candidate '" + rest[3] + "'"};
      list.erase(it);
      Json out;
      out["direction_id"] = d;
      out["removed"] = rest[3];
      return commit(std::move(out));
    }

    if (is("GET", {"directions", "*", "compare"})) {
      s->need_regions(d);
      std::vector<std::string> labels;
      std::vector<RouteMetrics> metrics;
      for (const auto& c : s->candidates[d]) {
        labels.push_back(c.label);
        metrics.push_back(s->metrics_of(c.route));
      }
      Json out = radar_json(radar_from_metrics(labels, metrics));
      out["direction_id"] = d;
      return json_response(200, out, s->revision);
    }

    if (is("POST", {"directions", "*", "diff"})) {
      s->need_regions(d);
      const auto body = parse_body(req.body);
      const nlohmann::json& geo = body.contains("reference") ? body["reference"] : body;
      ReferenceRoute ref = parse_reference_geojson(geo);
      const auto& list = s->candidates[d];
      const Candidate* ours = nullptr;
      if (body.contains("candidate") && body["candidate"].is_string()) {
        for (const auto& c : list) {
          if (c.label == body["candidate"].get<std::string>()) ours = &c;
        }
        if (!ours) throw ApiError{404, "not_found", "no candidate '" + body["candidate"].get<std::string>() + "'"};
      } else if (!list.empty()) {
        ours = &list.front();
      }
      if (!ours) throw ApiError{422, "no_candidate", "add a candidate route before comparing with a reference"};
      const double dep = ref.departure_s.value_or(ours->departure_s);
      const auto ctx = s->context();
      ShuttleRoute theirs = realize_reference(ctx, ref, dep, ours->dwell_s);
      theirs.direction_id = d;
      const auto members = s->directional->members(d);
      const auto rep = diff_routes(ctx, ours->route, theirs, members, s->direction_trips[static_cast<std::size_t>(d)]);
      Json out;
      out["direction_id"] = d;
      out["ours"] = {{"label", ours->label},
                     {"metrics", route_metrics_json(rep.ours_metrics)},
                     {"route", route_json(rep.ours)}};
      Json ref_stops = Json::array();
      for (const auto& st : rep.reference.stops) {
        ref_stops.push_back({{"spot_id", st.spot_id >= 0 ? Json(st.spot_id) : Json(nullptr)},
                             {"name", st.name},
                             {"matched", st.spot_id >= 0}});
      }
      out["reference"] = {{"label", ref.label},
                          {"metrics", route_metrics_json(rep.reference_metrics)},
                          {"route", route_json(rep.reference)},
                          {"stops", std::move(ref_stops)}};
      Json deltas = Json::array();
      for (const auto& sd : rep.spot_deltas) {
        deltas.push_back({{"spot_id", sd.spot_id},
                          {"ours_m", sd.ours_m},
                          {"reference_m", sd.reference_m},
                          {"delta_m", sd.delta_m}});
      }
      out["spot_deltas"] = std::move(deltas);
      Json overlay = Json::array();
      const auto ctx_geo = route_geojson(ctx, rep.ours, s->need_regions(d), rep.ours_metrics, timetable(rep.ours));
      overlay.push_back(ctx_geo["features"][0]);
      Json ref_line;
      ref_line["type"] = "Feature";
      std::vector<GeoPoint> pts = ref.polyline;
      if (pts.empty()) {
        pts.push_back(s->workplace);
        for (const auto& leg : rep.reference.legs) {
          for (const auto& p : leg.polyline) pts.push_back(p);
          pts.push_back(leg.to);
        }
      }
      Json coords = Json::array();
      for (const auto& p : pts) coords.push_back(Json::array({p.lon, p.lat}));
      ref_line["geometry"] = {{"type", "LineString"}, {"coordinates", std::move(coords)}};
      ref_line["properties"] = {{"kind", "reference"}, {"label", ref.label}};
      overlay.push_back(std::move(ref_line));
      out["overlay"] = {{"type", "FeatureCollection"}, {"features", std::move(overlay)}};
      return json_response(200, out, s->revision);
    }
  }

  if (is("GET", {"export"})) {
    Json out;
    out["dataset"] = s->dataset;
    out["revision"] = s->revision;
    out["records"] = s->records.size();
    out["rejects"] = s->rejects.size();
    out["spots"] = s->spots.size();
    out["k"] = s->k ? Json(*s->k) : Json(nullptr);
    out["seed"] = s->seed;
    out["threshold_m"] = s->threshold_m;
    if (s->directional && s->regional && s->voronoi) {
      out["voronoi"] = voronoi_geojson(*s->voronoi, s->spots, *s->directional, *s->regional);
    } else {
      out["voronoi"] = nullptr;
    }
    Json dirs = Json::array();
    if (s->directional && s->regional) {
      const auto ctx = s->context();
      for (int d = 0; d < s->directional->k; ++d) {
        const auto& regions = s->need_regions(d);
        Json dj;
        dj["direction_id"] = d;
        dj["regions"] = regions.size();
        Json ov = Json::array();
        for (const auto& [region, spot] : s->direction_overrides(d)) {
          ov.push_back({{"region_id", region}, {"spot_id", spot}});
        }
        dj["overrides"] = std::move(ov);
        dj["stop_metrics_csv"] = stop_metrics_csv(ctx, regions);
        Json cands = Json::array();
        for (const auto& c : s->candidates[d]) {
          const RouteMetrics rm = s->metrics_of(c.route);
          const Timetable tt = timetable(c.route);
          cands.push_back({{"label", c.label},
                           {"departure_time", format_time_of_day(c.departure_s)},
                           {"metrics", route_metrics_json(rm)},
                           {"route_geojson", route_geojson(ctx, c.route, regions, rm, tt)},
                           {"timetable_csv", timetable_csv(tt)}});
        }
        dj["candidates"] = std::move(cands);
        dirs.push_back(std::move(dj));
      }
    }
    out["directions"] = std::move(dirs);
    if (!config_.session_log_dir.empty() && !replaying) {
      std::ofstream snap(config_.session_log_dir / (s->id + ".snapshot.json"), std::ios::trunc);
      snap << out.dump() << '\n';
    }
    return json_response(200, out, s->revision);
  }

  throw ApiError{404, "not_found", "no route " + m + " " + req.path};
}

std::size_t PlanService::restore_sessions() {
  if (config_.session_log_dir.empty() || !fs::exists(config_.session_log_dir)) return 0;
  std::vector<fs::path> logs;
  for (const auto& e : fs::directory_iterator(config_.session_log_dir)) {
    if (e.path().extension() == ".jsonl") logs.push_back(e.path());
  }
  std::sort(logs.begin(), logs.end());
  std::size_t restored = 0;
  for (const auto& path : logs) {
    const std::string id = path.stem().string();
    try {
      std::ifstream in(path);
      std::string line;
      bool first = true;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto e = nlohmann::json::parse(line);
        ApiRequest req;
        req.method = e.at("method").get<std::string>();
        req.path = e.at("path").get<std::string>();
        req.query = e.at("query").get<std::map<std::string, std::string>>();
        req.body = e.at("body").get<std::string>();
        if (first && req.path != "/sessions") throw std::runtime_error("log does not start with session creation");
        const ApiResponse r = dispatch(req, true, first ? id : "");
        if (r.status >= 300) throw std::runtime_error("replayed event failed: " + r.body);
        first = false;
      }
      if (!first) ++restored;
    } catch (const ApiError& e) {
      if (config_.log) config_.log("cannot restore session " + id + ": " + e.message);
      std::unique_lock lock(sessions_mu_);
      sessions_.erase(id);
    } catch (const std::exception& e) {
      if (config_.log) config_.log("cannot restore session " + id + ": " + e.what());
      std::unique_lock lock(sessions_mu_);
      sessions_.erase(id);
    }
  }
  return restored;
}

}  // namespace shuttleplan
