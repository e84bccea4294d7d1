#include "shuttleplan/network.hpp"

#include <istream>
#include <ostream>
#include <string>

#include "csv.hpp"
#include "shuttleplan/errors.hpp"

namespace shuttleplan {
namespace {

std::optional<ModeMask> parse_modes(std::string_view s) {
  s = csv::trim(s);
  ModeMask mask = 0;
  while (!s.empty()) {
    const auto bar = s.find('|');
    const std::string_view tok = csv::trim(s.substr(0, bar));
    if (tok == "walk") {
      mask |= mode_bit(TravelMode::kWalk);
    } else if (tok == "drive") {
      mask |= mode_bit(TravelMode::kDrive);
    } else {
      return std::nullopt;
    }
    if (bar == std::string_view::npos) break;
    s.remove_prefix(bar + 1);
  }
  if (mask == 0) return std::nullopt;
  return mask;
}

std::string format_modes(ModeMask m) {
  const bool walk = m & mode_bit(TravelMode::kWalk);
  const bool drive = m & mode_bit(TravelMode::kDrive);
  if (walk && drive) return "walk|drive";
  return walk ? "walk" : "drive";
}

void expect_header(std::istream& in, std::string_view expected, std::string_view alt, const char* what) {
  std::string line;
  if (!csv::read_line(in, line, true)) throw FormatError(std::string(what) + " file is empty");
  const auto trimmed = csv::trim(line);
  if (trimmed != expected && (alt.empty() || trimmed != alt)) {
    throw FormatError(std::string(what) + " header must be '" + std::string(expected) + "'");
  }
}

}  // namespace

int RoadNetwork::add_node(std::int64_t external_id, const GeoPoint& location) {
  if (!is_valid(location)) {
    throw PlanError("invalid_node", "node " + std::to_string(external_id) + " has an invalid location");
  }
  if (index_.contains(external_id)) {
    throw PlanError("duplicate_node", "node id " + std::to_string(external_id) + " appears twice");
  }
  const int idx = static_cast<int>(locations_.size());
  locations_.push_back(location);
  ids_.push_back(external_id);
  index_.emplace(external_id, idx);
  return idx;
}

void RoadNetwork::add_edge(std::int64_t from_id, std::int64_t to_id, double length_m, ModeMask modes,
                           std::optional<double> walk_duration_s) {
  const auto from = index_of(from_id);
  const auto to = index_of(to_id);
  const std::string label = std::to_string(from_id) + "->" + std::to_string(to_id);
  if (!from || !to) throw PlanError("unknown_node", "edge " + label + " references a missing node");
  if (!(length_m > 0.0)) throw PlanError("invalid_edge", "edge " + label + " must have positive length");
  if (length_m < 0.99 * haversine_m(location(*from), location(*to))) {
    throw PlanError("invalid_edge", "edge " + label + " is shorter than the straight-line distance");
  }
  if (walk_duration_s && !(*walk_duration_s > 0.0)) {
    throw PlanError("invalid_edge", "edge " + label + " has a non-positive walk duration");
  }
  edges_.push_back(RoadEdge{*from, *to, length_m, modes, walk_duration_s});
}

std::optional<int> RoadNetwork::index_of(std::int64_t external_id) const {
  auto it = index_.find(external_id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

RoadNetwork read_road_network(std::istream& nodes, std::istream& edges) {
  RoadNetwork net;
  std::string line;
  expect_header(nodes, "id,lat,lon", "", "nodes");
  std::size_t line_no = 1;
  while (csv::read_line(nodes, line, false)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    auto f = csv::split(line);
    std::optional<long long> id;
    std::optional<double> lat, lon;
    if (f && f->size() == 3) {
      id = csv::to_int((*f)[0]);
      lat = csv::to_double((*f)[1]);
      lon = csv::to_double((*f)[2]);
    }
    if (!id || !lat || !lon) throw FormatError("nodes line " + std::to_string(line_no) + " is malformed");
    net.add_node(*id, GeoPoint{*lat, *lon});
  }

  expect_header(edges, "from,to,length_m,modes", "from,to,length_m,modes,walk_duration_s", "edges");
  line_no = 1;
  while (csv::read_line(edges, line, false)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    auto f = csv::split(line);
    if (!f || (f->size() != 4 && f->size() != 5)) {
      throw FormatError("edges line " + std::to_string(line_no) + " is malformed");
    }
    const auto from = csv::to_int((*f)[0]);
    const auto to = csv::to_int((*f)[1]);
    const auto len = csv::to_double((*f)[2]);
    const auto modes = parse_modes((*f)[3]);
    std::optional<double> walk_dura;
    bool ok = from && to && len && modes;
    if (f->size() == 5 && !csv::trim((*f)[4]).empty()) {
      walk_dura = csv::to_double((*f)[4]);
      ok = ok && walk_dura.has_value();
    }
    if (!ok) throw FormatError("edges line " + std::to_string(line_no) + " is malformed");
    try {
      net.add_edge(*from, *to, *len, *modes, walk_dura);
    } catch (const PlanError& e) {
      throw PlanError(e.code(), "edges line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return net;
}

void write_nodes(std::ostream& out, const RoadNetwork& network) {
  out << "id,lat,lon\n";
  for (std::size_t i = 0; i < network.node_count(); ++i) {
    const auto& p = network.location(static_cast<int>(i));
    out << network.external_id(static_cast<int>(i)) << ',' << csv::format_double(p.lat) << ','
        << csv::format_double(p.lon) << '\n';
  }
}

void write_edges(std::ostream& out, const RoadNetwork& network) {
  bool any_override = false;
  for (const auto& e : network.edges()) any_override |= e.walk_duration_s.has_value();
  out << (any_override ? "from,to,length_m,modes,walk_duration_s\n" : "from,to,length_m,modes\n");
  for (const auto& e : network.edges()) {
    out << network.external_id(e.from) << ',' << network.external_id(e.to) << ',' << csv::format_double(e.length_m)
        << ',' << format_modes(e.modes);
    if (any_override) {
      out << ',';
      if (e.walk_duration_s) out << csv::format_double(*e.walk_duration_s);
    }
    out << '\n';
  }
}

}  // namespace shuttleplan
