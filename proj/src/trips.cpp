#include "shuttleplan/trips.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>

#include "csv.hpp"
#include "shuttleplan/errors.hpp"

namespace shuttleplan {
namespace {

std::optional<std::int64_t> parse_payment(std::string_view s) {
  s = csv::trim(s);
  if (s.empty() || s.front() == '-' || s.front() == '+') return std::nullopt;
  const auto dot = s.find('.');
  const std::string_view whole = s.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
  if (whole.empty() || frac.size() > 2 || (dot != std::string_view::npos && frac.empty())) return std::nullopt;
  const auto units = csv::to_int(whole);
  if (!units || *units < 0) return std::nullopt;
  std::int64_t cents = 0;
  if (!frac.empty()) {
    const auto f = csv::to_int(frac);
    if (!f || *f < 0) return std::nullopt;
    cents = frac.size() == 1 ? *f * 10 : *f;
  }
  return *units * 100 + cents;
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

// Unions every pair within radius_m. Sweeps in latitude order so only pairs
// inside the latitude band are tested.
bool link_within_radius(const std::vector<GeoPoint>& points, double radius_m, DisjointSets& sets) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return points[a].lat < points[b].lat || (points[a].lat == points[b].lat && a < b);
  });
  // Meridian degrees per meter, padded so the band never cuts a valid pair.
  const double band_deg = radius_m / (kEarthRadiusM * std::numbers::pi / 180.0) * 1.001 + 1e-9;
  bool merged = false;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const GeoPoint& a = points[order[i]];
      const GeoPoint& b = points[order[j]];
      if (b.lat - a.lat > band_deg) break;
      if (haversine_m(a, b) <= radius_m) merged |= sets.unite(order[i], order[j]);
    }
  }
  return merged;
}

struct Group {
  std::vector<std::size_t> places;
  std::map<std::string, long long> label_weight;
  long long weight = 0;
  GeoPoint location;
  std::size_t first = 0;
};

GeoPoint weighted_centroid(const std::vector<WeightedPlace>& places, const std::vector<std::size_t>& members) {
  if (members.size() == 1) return places[members.front()].location;
  long double lat = 0, lon = 0, w = 0;
  for (auto i : members) {
    lat += static_cast<long double>(places[i].location.lat) * places[i].weight;
    lon += static_cast<long double>(places[i].location.lon) * places[i].weight;
    w += places[i].weight;
  }
  return GeoPoint{static_cast<double>(lat / w), static_cast<double>(lon / w)};
}

}  // namespace

TripParseResult parse_trips(std::istream& in, const GeoPoint& workplace, const TripParseOptions& options) {
  std::string line;
  if (!csv::read_line(in, line, true)) throw FormatError("trips file is empty");
  {
    auto header = csv::split(line);
    auto expected = csv::split(kTripsHeader);
    if (!header || header->size() != expected->size()) throw FormatError("trips header does not match schema");
    for (std::size_t i = 0; i < header->size(); ++i) {
      if (csv::trim((*header)[i]) != (*expected)[i]) {
        throw FormatError("trips header column " + std::to_string(i + 1) + " is '" + (*header)[i] +
                          "', expected '" + (*expected)[i] + "'");
      }
    }
  }

  TripParseResult result;
  std::size_t line_no = 1;
  while (csv::read_line(in, line, false)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    auto reject = [&](std::string reason) { result.rejects.push_back({line_no, std::move(reason)}); };
    auto fields = csv::split(line);
    if (!fields) {
      reject("unterminated quoted field");
      continue;
    }
    if (fields->size() != 9) {
      reject("expected 9 fields, found " + std::to_string(fields->size()));
      continue;
    }
    const auto& f = *fields;
    TripRecord r;
    r.employee_id = std::string(csv::trim(f[0]));
    if (r.employee_id.empty()) {
      reject("empty employee_id");
      continue;
    }
    try {
      r.departure_time = parse_iso_timestamp(csv::trim(f[1]));
      r.arrival_time = parse_iso_timestamp(csv::trim(f[2]));
    } catch (const FormatError& e) {
      reject(e.what());
      continue;
    }
    const auto olat = csv::to_double(f[3]), olon = csv::to_double(f[4]);
    const auto dlat = csv::to_double(f[6]), dlon = csv::to_double(f[7]);
    if (!olat || !olon || !dlat || !dlon) {
      reject("unparsable coordinate");
      continue;
    }
    r.origin = {*olat, *olon};
    r.destination = {*dlat, *dlon};
    r.destination_raw = f[5];
    const auto payment = parse_payment(f[8]);
    if (!payment) {
      reject("payment must be a non-negative amount with at most two decimals");
      continue;
    }
    r.payment_cents = *payment;
    if (r.arrival_time < r.departure_time) {
      reject("arrival_time < departure_time");
      continue;
    }
    if (!is_valid(r.origin)) {
      reject("origin coordinate out of range");
      continue;
    }
    if (!is_valid(r.destination)) {
      reject("destination coordinate out of range");
      continue;
    }
    if (haversine_m(r.origin, workplace) > options.workplace_tolerance_m) {
      reject("origin is not the workplace");
      continue;
    }
    result.records.push_back(std::move(r));
  }
  return result;
}

std::string format_payment(std::int64_t cents) {
  const std::string frac = std::to_string(cents % 100);
  return std::to_string(cents / 100) + "." + (frac.size() == 1 ? "0" + frac : frac);
}

void write_trips(std::ostream& out, const std::vector<TripRecord>& records) {
  out << kTripsHeader << '\n';
  for (const auto& r : records) {
    out << csv::escape(r.employee_id) << ',' << format_iso_timestamp(r.departure_time) << ','
        << format_iso_timestamp(r.arrival_time) << ',' << csv::format_double(r.origin.lat) << ','
        << csv::format_double(r.origin.lon) << ',' << csv::escape(r.destination_raw) << ','
        << csv::format_double(r.destination.lat) << ',' << csv::format_double(r.destination.lon) << ','
        << format_payment(r.payment_cents) << '\n';
  }
}

LocationOverrides read_overrides(std::istream& in) {
  std::string line;
  LocationOverrides out;
  if (!csv::read_line(in, line, true)) return out;
  auto header = csv::split(line);
  if (!header || header->size() != 3 || csv::trim((*header)[0]) != "label" || csv::trim((*header)[1]) != "lat" ||
      csv::trim((*header)[2]) != "lon") {
    throw FormatError("overrides header must be label,lat,lon");
  }
  std::size_t line_no = 1;
  while (csv::read_line(in, line, false)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    auto f = csv::split(line);
    std::optional<double> lat, lon;
    if (f && f->size() == 3) {
      lat = csv::to_double((*f)[1]);
      lon = csv::to_double((*f)[2]);
    }
    if (!lat || !lon || !is_valid({*lat, *lon})) {
      throw FormatError("overrides line " + std::to_string(line_no) + " is invalid");
    }
    out[(*f)[0]] = GeoPoint{*lat, *lon};
  }
  return out;
}

std::size_t apply_overrides(std::vector<TripRecord>& records, const LocationOverrides& overrides) {
  std::size_t changed = 0;
  for (auto& r : records) {
    auto it = overrides.find(r.destination_raw);
    if (it != overrides.end()) {
      r.destination = it->second;
      ++changed;
    }
  }
  return changed;
}

Unification unify_places(const std::vector<WeightedPlace>& places, double radius_m) {
  if (places.empty()) throw PlanError("empty_input", "cannot unify an empty set of destinations");
  for (const auto& p : places) {
    if (p.weight < 1) throw PlanError("invalid_weight", "place weights must be positive");
  }

  std::vector<Group> groups(places.size());
  for (std::size_t i = 0; i < places.size(); ++i) {
    groups[i].places = {i};
    groups[i].label_weight[places[i].label] = places[i].weight;
    groups[i].weight = places[i].weight;
    groups[i].location = places[i].location;
    groups[i].first = i;
  }

  // First pass is plain single linkage over the places; later passes only
  // fire when merged centroids ended up within the radius of each other.
  for (;;) {
    std::vector<GeoPoint> locations;
    locations.reserve(groups.size());
    for (const auto& g : groups) locations.push_back(g.location);
    DisjointSets sets(groups.size());
    if (!link_within_radius(locations, radius_m, sets)) break;

    std::map<std::size_t, Group> merged;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      Group& dst = merged[sets.find(i)];
      if (dst.places.empty()) dst.first = groups[i].first;
      dst.first = std::min(dst.first, groups[i].first);
      dst.places.insert(dst.places.end(), groups[i].places.begin(), groups[i].places.end());
      for (const auto& [label, w] : groups[i].label_weight) dst.label_weight[label] += w;
      dst.weight += groups[i].weight;
    }
    groups.clear();
    for (auto& [root, g] : merged) {
      std::sort(g.places.begin(), g.places.end());
      g.location = weighted_centroid(places, g.places);
      groups.push_back(std::move(g));
    }
  }

  std::sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) { return a.first < b.first; });
  Unification out;
  out.record_spot.assign(places.size(), -1);
  for (std::size_t s = 0; s < groups.size(); ++s) {
    const Group& g = groups[s];
    DropOffSpot spot;
    spot.spot_id = static_cast<int>(s);
    spot.location = g.location;
    spot.order_count = static_cast<int>(g.weight);
    long long best = -1;
    for (const auto& [label, w] : g.label_weight) {  // map order: ties keep the smallest label
      if (w > best) {
        best = w;
        spot.name = label;
      }
    }
    for (auto i : g.places) out.record_spot[i] = spot.spot_id;
    out.spots.push_back(std::move(spot));
  }
  return out;
}

Unification unify_locations(const std::vector<TripRecord>& records, double radius_m) {
  std::vector<WeightedPlace> places;
  places.reserve(records.size());
  for (const auto& r : records) places.push_back({r.destination, r.destination_raw, 1});
  return unify_places(places, radius_m);
}

}  // namespace shuttleplan
