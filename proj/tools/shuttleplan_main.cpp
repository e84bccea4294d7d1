#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "shuttleplan/errors.hpp"
#include "shuttleplan/http_server.hpp"
#include "shuttleplan/service.hpp"
#include "shuttleplan/synthetic.hpp"
#include "shuttleplan/time.hpp"

namespace fs = std::filesystem;
using namespace shuttleplan;

namespace {

int run_serve(const std::string& host, int port, const ServiceConfig& cfg) {
  PlanService service(cfg);
  if (const std::size_t n = service.restore_sessions()) std::cerr << "restored " << n << " session(s)\n";
  HttpServer server(service);
  const int bound = server.bind(host, port);
  if (bound <= 0) {
    std::cerr << "cannot bind " << host << ":" << port << "\n";
    return 1;
  }
  std::cerr << "listening on http://" << host << ":" << bound << "\n";
  server.listen();
  return 0;
}

nlohmann::json call(PlanService& svc, const std::string& method, const std::string& path, const nlohmann::json& body,
                    std::map<std::string, std::string> query = {}) {
  ApiRequest req;
  req.method = method;
  req.path = path;
  req.query = std::move(query);
  if (!body.is_null()) req.body = body.dump();
  const ApiResponse r = svc.handle(req);
  auto j = nlohmann::json::parse(r.body);
  if (r.status >= 300) {
    throw std::runtime_error(method + " " + path + " -> " + std::to_string(r.status) + " " +
                             j.value("error", "") + ": " + j.value("message", ""));
  }
  return j;
}

int run_plan(const fs::path& data, int k, std::uint64_t seed, double threshold, const std::vector<std::string>& departures,
             const fs::path& out) {
  ServiceConfig cfg;
  cfg.data_dir = fs::absolute(data);
  cfg.threshold_default_m = threshold;
  cfg.log = [](const std::string& m) { std::cerr << m << "\n"; };
  PlanService svc(cfg);
  const auto created = call(svc, "POST", "/sessions", {{"dataset", "."}});
  const std::string base = "/sessions/" + created["session_id"].get<std::string>();
  std::cout << "records " << created["records"] << ", spots " << created["spots"] << ", rejects "
            << created["rejects"].size() << "\n";
  if (k <= 0) {
    const auto curve = call(svc, "GET", base + "/silhouette", nullptr, {{"seed", std::to_string(seed)}});
    k = curve["best_k"].get<int>();
    std::cout << "silhouette argmax k = " << k << "\n";
  }
  const auto dirs = call(svc, "PUT", base + "/k", {{"k", k}, {"seed", seed}});
  call(svc, "POST", base + "/regions", {{"threshold_m", threshold}});
  for (const auto& d : dirs["directions"]) {
    const int id = d["direction_id"].get<int>();
    for (const auto& dep : departures) {
      const auto c = call(svc, "POST", base + "/directions/" + std::to_string(id) + "/candidates",
                          {{"departure_time", dep}});
      const auto& m = c["candidate"]["metrics"];
      std::printf("direction %d  depart %s  stops %zu  drive %.0f s / %.0f m  reach800 %.3f  nums %lld\n", id,
                  dep.c_str(), c["candidate"]["route"]["stops"].size(), m["driving_dura"].get<double>(),
                  m["driving_dist"].get<double>(), m["walk_reach800"].get<double>(), m["nums"].get<long long>());
    }
  }
  const auto bundle = call(svc, "GET", base + "/export", nullptr);
  if (!out.empty()) {
    std::ofstream f(out, std::ios::binary);
    f << bundle.dump() << '\n';
    std::cout << "wrote " << out.string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shuttle route planning engine"};
  app.require_subcommand(1);

  auto* serve = app.add_subcommand("serve", "Run the JSON-over-HTTP planning service");
  std::string host = "127.0.0.1";
  int port = 8080;
  ServiceConfig cfg;
  std::string data_dir = ".", log_dir;
  serve->add_option("--host", host)->envname("SHUTTLEPLAN_HOST");
  serve->add_option("--port", port)->envname("SHUTTLEPLAN_PORT");
  serve->add_option("--data-dir", data_dir, "Root for dataset paths")->envname("SHUTTLEPLAN_DATA_DIR");
  serve->add_option("--walk-speed", cfg.walk_speed_mps, "Walking speed in m/s")->envname("SHUTTLEPLAN_WALK_SPEED");
  serve->add_option("--threshold-default", cfg.threshold_default_m, "Regional walking threshold in meters")
      ->envname("SHUTTLEPLAN_THRESHOLD_DEFAULT");
  serve->add_option("--session-log-dir", log_dir, "Directory for session event logs")
      ->envname("SHUTTLEPLAN_SESSION_LOG_DIR");

  auto* gen = app.add_subcommand("generate", "Write a synthetic dataset with planted structure");
  SyntheticSpec spec;
  std::uint64_t gen_seed = 7;
  std::string gen_out;
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--seed", gen_seed);
  gen->add_option("--directions", spec.directions);
  gen->add_option("--spread", spec.spread_deg, "Angular width of each direction in degrees");
  gen->add_option("--neighbourhoods", spec.neighbourhoods_per_direction);
  gen->add_option("--spots", spec.spots_per_neighbourhood, "Spots per neighbourhood");
  gen->add_option("--days", spec.days);

  auto* plan = app.add_subcommand("plan", "Run the planning loop on a dataset directory and export the bundle");
  std::string plan_data, plan_out;
  int plan_k = 0;
  std::uint64_t plan_seed = 0;
  double plan_threshold = 1000.0;
  std::vector<std::string> departures{"21:30"};
  plan->add_option("--data", plan_data, "Directory with trips.csv, nodes.csv, edges.csv[, profiles.json]")->required();
  plan->add_option("--k", plan_k, "Number of directions; 0 picks the silhouette argmax");
  plan->add_option("--seed", plan_seed);
  plan->add_option("--threshold", plan_threshold);
  plan->add_option("--departure", departures, "Departure time HH:MM, repeatable (up to three)");
  plan->add_option("--out", plan_out, "Write the export bundle here");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*serve) {
      cfg.data_dir = data_dir;
      cfg.session_log_dir = log_dir;
      cfg.log = [](const std::string& m) { std::cerr << m << "\n"; };
      return run_serve(host, port, cfg);
    }
    if (*gen) {
      const auto data = generate_synthetic(spec, gen_seed);
      write_dataset(data, gen_out);
      std::cout << data.records.size() << " trips, " << data.metadata.spot_names.size() << " spots, "
                << data.network.node_count() << " nodes, " << data.profiles.size() << " profile legs -> " << gen_out
                << "\n";
      return 0;
    }
    if (*plan) return run_plan(plan_data, plan_k, plan_seed, plan_threshold, departures, plan_out);
  } catch (const PlanError& e) {
    std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
