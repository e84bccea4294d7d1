#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fstream>

#include "shuttleplan/directional.hpp"
#include "shuttleplan/errors.hpp"
#include "shuttleplan/regional.hpp"
#include "shuttleplan/service.hpp"
#include "shuttleplan/stop_metrics.hpp"
#include "shuttleplan/synthetic.hpp"
#include "shuttleplan/trips.hpp"

namespace py = pybind11;
using namespace shuttleplan;

namespace {

WalkMatrix square_matrix(const std::vector<int>& ids, const std::vector<std::vector<double>>& rows) {
  std::vector<double> flat;
  if (rows.size() != ids.size()) throw PlanError("invalid_matrix", "matrix must be len(ids) x len(ids)");
  for (const auto& r : rows) {
    if (r.size() != ids.size()) throw PlanError("invalid_matrix", "matrix must be len(ids) x len(ids)");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return WalkMatrix::from_distances(ids, flat);
}

py::dict spot_dict(const DropOffSpot& s) {
  py::dict d;
  d["spot_id"] = s.spot_id;
  d["name"] = s.name;
  d["lat"] = s.location.lat;
  d["lon"] = s.location.lon;
  d["order_count"] = s.order_count;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Shuttle-route planning engine";

  py::register_exception<PlanError>(m, "PlanError", PyExc_ValueError);

  m.def("haversine_m", [](double lat1, double lon1, double lat2, double lon2) {
    return haversine_m({lat1, lon1}, {lat2, lon2});
  });
  m.def("bearing_deg", [](double lat1, double lon1, double lat2, double lon2) {
    return bearing_deg({lat1, lon1}, {lat2, lon2});
  });

  m.def(
      "generate_dataset",
      [](const std::filesystem::path& out, std::uint64_t seed, int directions, int days, int employees) {
        SyntheticSpec spec;
        spec.directions = directions;
        spec.days = days;
        spec.employees = employees;
        const auto data = generate_synthetic(spec, seed);
        write_dataset(data, out);
        py::dict d;
        d["records"] = data.records.size();
        d["spots"] = data.metadata.spot_names.size();
        d["direction_labels"] = data.metadata.direction_labels;
        d["direction_bearings_deg"] = data.metadata.direction_bearings_deg;
        return d;
      },
      py::arg("out_dir"), py::arg("seed") = 7, py::arg("directions") = 9, py::arg("days") = 20,
      py::arg("employees") = 400);

  m.def(
      "load_spots",
      [](const std::filesystem::path& trips_csv, double lat, double lon, double radius_m) {
        std::ifstream in(trips_csv);
        if (!in) throw PlanError("missing_file", "cannot open " + trips_csv.string());
        auto parsed = parse_trips(in, {lat, lon});
        const auto uni = unify_locations(parsed.records, radius_m);
        py::list spots;
        for (const auto& s : uni.spots) spots.append(spot_dict(s));
        py::list rejects;
        for (const auto& r : parsed.rejects) rejects.append(py::make_tuple(r.line, r.reason));
        py::dict d;
        d["records"] = parsed.records.size();
        d["rejects"] = rejects;
        d["spots"] = spots;
        return d;
      },
      py::arg("trips_csv"), py::arg("lat"), py::arg("lon"), py::arg("radius_m") = kDefaultUnifyRadiusM);

  m.def(
      "cluster_bearings",
      [](const std::vector<double>& bearings, const std::vector<double>& weights, int k, std::uint64_t seed,
         bool weighted) {
        DirectionalOptions opts;
        opts.weighted = weighted;
        const auto c = cluster_bearings(bearings, weights, k, seed, opts);
        py::dict d;
        d["direction"] = c.direction;
        d["centroid_deg"] = c.centroid_deg;
        d["silhouette"] = k >= 2 ? silhouette(c) : 0.0;
        return d;
      },
      py::arg("bearings_deg"), py::arg("weights"), py::arg("k"), py::arg("seed") = 0, py::arg("weighted") = true);

  m.def(
      "silhouette",
      [](const std::vector<double>& bearings, const std::vector<double>& weights, const std::vector<int>& labels,
         int k) {
        DirectionalClustering c;
        c.k = k;
        c.bearing_deg = bearings;
        c.weight = weights;
        c.direction = labels;
        for (std::size_t i = 0; i < bearings.size(); ++i) c.spot_ids.push_back(static_cast<int>(i));
        if (weights.size() != bearings.size() || labels.size() != bearings.size()) {
          throw PlanError("invalid_input", "bearings, weights and labels must have equal length");
        }
        for (int l : labels)
          if (l < 0 || l >= k) throw PlanError("invalid_input", "labels must lie in [0, k)");
        return silhouette(c);
      },
      py::arg("bearings_deg"), py::arg("weights"), py::arg("labels"), py::arg("k"));

  m.def(
      "greedy_regions",
      [](const std::vector<int>& ids, const std::vector<long long>& weights,
         const std::vector<std::vector<double>>& dist, double threshold_m) {
        const auto walk = square_matrix(ids, dist);
        std::vector<std::vector<int>> out;
        for (const auto& r : greedy_regions(ids, weights, walk, threshold_m)) out.push_back(r.member_spot_ids);
        return out;
      },
      py::arg("ids"), py::arg("weights"), py::arg("dist"), py::arg("threshold_m") = kDefaultRegionThresholdM);

  m.def(
      "stop_metrics",
      [](int candidate, const std::vector<int>& ids, const std::map<int, double>& weights,
         const std::vector<std::vector<double>>& dist, bool include_self) {
        const auto walk = square_matrix(ids, dist);
        RegionalCluster region{0, 0, ids, 0, ids.empty() ? 0 : ids.front()};
        StopMetricsOptions opts;
        opts.include_self = include_self;
        const auto s = stop_metrics(candidate, region, walk, weights, opts);
        py::dict d;
        d["avg_dist"] = s.avg_dist;
        d["avg_dura"] = s.avg_dura;
        d["dist_cost"] = s.dist_cost;
        d["reach"] = s.reach;
        d["total_weight"] = s.total_weight;
        return d;
      },
      py::arg("candidate"), py::arg("ids"), py::arg("weights"), py::arg("dist"), py::arg("include_self") = true);

  py::class_<PlanService>(m, "Service")
      .def(py::init([](const std::filesystem::path& data_dir, const std::filesystem::path& session_log_dir) {
             ServiceConfig cfg;
             cfg.data_dir = data_dir;
             cfg.session_log_dir = session_log_dir;
             return std::make_unique<PlanService>(cfg);
           }),
           py::arg("data_dir"), py::arg("session_log_dir") = std::filesystem::path())
      .def(
          "handle",
          [](PlanService& svc, const std::string& method, const std::string& path, const std::string& body,
             const std::map<std::string, std::string>& query, std::optional<long long> if_match) {
            ApiRequest r{method, path, query, body, if_match};
            ApiResponse res;
            {
              py::gil_scoped_release release;
              res = svc.handle(r);
            }
            return py::make_tuple(res.status, res.body);
          },
          py::arg("method"), py::arg("path"), py::arg("body") = "", py::arg("query") = std::map<std::string, std::string>{},
          py::arg("if_match") = py::none())
      .def("restore_sessions", &PlanService::restore_sessions)
      .def_property_readonly("session_count", &PlanService::session_count);
}
