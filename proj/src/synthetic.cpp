#include "shuttleplan/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

#include "json.hpp"
#include "shuttleplan/errors.hpp"

namespace shuttleplan {
namespace {

using Rng = std::mt19937_64;

const char* const kSyllables[] = {"an",   "bao", "bei",  "cheng", "dong", "fu",  "gang", "hai", "hong", "hua",
                                  "jia",  "jing", "kang", "lan",  "li",   "lin", "long", "mei", "ming", "nan",
                                  "ping", "qiao", "rui",  "shan", "song", "tai", "tian", "wan", "xin",  "ya",
                                  "yi",   "yuan", "ze",   "zhu"};
const char* const kSuffixes[] = {"Garden", "Court", "Villa", "Park", "Estate", "Heights", "Terrace"};

std::string capitalized(std::string s) {
  s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::string make_name(Rng& rng, std::set<std::string>& used) {
  std::uniform_int_distribution<std::size_t> syl(0, std::size(kSyllables) - 1);
  std::uniform_int_distribution<std::size_t> suf(0, std::size(kSuffixes) - 1);
  for (;;) {
    std::string name = capitalized(kSyllables[syl(rng)]) + kSyllables[syl(rng)] + " " +
                       capitalized(kSyllables[syl(rng)]) + kSyllables[syl(rng)] + " " + kSuffixes[suf(rng)];
    if (used.insert(name).second) return name;
  }
}

double interpolate(const std::vector<CongestionPoint>& schedule, double t, double CongestionPoint::*field) {
  if (schedule.empty()) return 1.0;
  if (t <= schedule.front().time_s) return schedule.front().*field;
  if (t >= schedule.back().time_s) return schedule.back().*field;
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    const auto& a = schedule[i - 1];
    const auto& b = schedule[i];
    if (t <= b.time_s) {
      if (b.time_s == a.time_s) return b.*field;
      const double u = (t - a.time_s) / (b.time_s - a.time_s);
      return a.*field + u * (b.*field - a.*field);
    }
  }
  return schedule.back().*field;
}

PlanarPoint polar(double bearing, double r) {
  const double rad = bearing * std::numbers::pi / 180.0;
  return {r * std::sin(rad), r * std::cos(rad)};
}

double manhattan(const PlanarPoint& a, const PlanarPoint& b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

void validate(const SyntheticSpec& spec) {
  auto bad = [](const std::string& why) { throw PlanError("invalid_spec", why); };
  if (spec.directions < 1) bad("at least one direction is required");
  if (spec.peaks.empty()) bad("departure peak mixture is empty");
  if (spec.neighbourhoods_per_direction < 1 || spec.spots_per_neighbourhood < 1) bad("spot mixture is empty");
  double total = 0.0;
  for (const auto& p : spec.peaks) {
    if (!(p.weight >= 0.0) || !(p.stddev_s >= 0.0)) bad("peak weights and spreads must be non-negative");
    total += p.weight;
  }
  if (!(total > 0.0)) bad("peak weights sum to zero");
  if (spec.min_orders < 1 || spec.max_orders < spec.min_orders) bad("order range is empty");
  if (spec.days < 1 || spec.employees < 1) bad("days and employees must be positive");
  if (!(spec.min_distance_m > 0.0) || spec.max_distance_m <= spec.min_distance_m) bad("distance range is empty");
  if (!(spec.grid_spacing_m > 0.0) || !(spec.drive_speed_mps > 0.0)) bad("grid spacing and speed must be positive");
  if (!(spec.first_leg_step_s > 0.0) || !(spec.inter_stop_step_s > 0.0) || spec.profile_end_s < spec.profile_start_s) {
    bad("profile sampling range is empty");
  }
  for (std::size_t i = 1; i < spec.congestion.size(); ++i) {
    if (spec.congestion[i].time_s < spec.congestion[i - 1].time_s) bad("congestion schedule is not sorted");
  }
}

}  // namespace

double congestion_factor_duration(const std::vector<CongestionPoint>& schedule, double time_s) {
  return interpolate(schedule, time_s, &CongestionPoint::duration_factor);
}

double congestion_factor_distance(const std::vector<CongestionPoint>& schedule, double time_s) {
  return interpolate(schedule, time_s, &CongestionPoint::distance_factor);
}

SyntheticDataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  validate(spec);
  Rng rng(seed);
  SyntheticDataset out;
  auto& meta = out.metadata;
  meta.seed = seed;
  meta.peaks = spec.peaks;
  meta.congestion = spec.congestion;

  const LocalProjection proj(spec.workplace);
  std::set<std::string> used_names;
  std::vector<PlanarPoint> planar;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double gap = 360.0 / spec.directions;
  for (int d = 0; d < spec.directions; ++d) {
    const double center = wrap_deg_360(spec.first_bearing_deg + d * gap);
    meta.direction_labels.push_back("D" + std::to_string(d));
    meta.direction_bearings_deg.push_back(center);
    const double band = (spec.max_distance_m - spec.min_distance_m) / spec.neighbourhoods_per_direction;
    for (int h = 0; h < spec.neighbourhoods_per_direction; ++h) {
      const double r0 = spec.min_distance_m + band * (h + 0.25 + 0.5 * unit(rng));
      const double b0 = center + spec.spread_deg * (unit(rng) - 0.5) * 0.5;
      const PlanarPoint hub = polar(b0, r0);
      for (int s = 0; s < spec.spots_per_neighbourhood; ++s) {
        bool placed = false;
        for (int attempt = 0; attempt < 2000 && !placed; ++attempt) {
          const double rr = spec.neighbourhood_radius_m * std::sqrt(unit(rng));
          const double th = 2.0 * std::numbers::pi * unit(rng);
          const PlanarPoint p{hub.x + rr * std::cos(th), hub.y + rr * std::sin(th)};
          const double r = std::hypot(p.x, p.y);
          if (r < spec.min_distance_m * 0.5) continue;
          const double b = wrap_deg_360(std::atan2(p.x, p.y) * 180.0 / std::numbers::pi);
          if (std::abs(angle_diff_deg(center, b)) > spec.spread_deg / 2) continue;
          bool clear = true;
          for (const auto& q : planar) {
            if (std::hypot(p.x - q.x, p.y - q.y) < spec.min_spot_separation_m) {
              clear = false;
              break;
            }
          }
          if (!clear) continue;
          planar.push_back(p);
          meta.spot_locations.push_back(proj.inverse(p));
          meta.spot_direction.push_back(d);
          meta.spot_names.push_back(make_name(rng, used_names));
          placed = true;
        }
        if (!placed) throw PlanError("invalid_spec", "cannot place spots with the requested separation");
      }
    }
  }

  // Trips.
  const Timestamp epoch = parse_iso_timestamp(spec.start_date + "T00:00");
  std::vector<double> peak_weights;
  for (const auto& p : spec.peaks) peak_weights.push_back(p.weight);
  std::discrete_distribution<int> pick_peak(peak_weights.begin(), peak_weights.end());
  std::uniform_int_distribution<int> pick_day(0, spec.days - 1);
  std::uniform_int_distribution<int> pick_employee(0, spec.employees - 1);
  std::uniform_int_distribution<int> pick_orders(spec.min_orders, spec.max_orders);
  std::normal_distribution<double> gauss(0.0, 1.0);

  struct Pending {
    TripRecord rec;
    int spot;
  };
  std::vector<Pending> pending;
  for (std::size_t s = 0; s < planar.size(); ++s) {
    const int orders = pick_orders(rng);
    const double base = manhattan({0, 0}, planar[s]);
    for (int k = 0; k < orders; ++k) {
      TripRecord r;
      char emp[16];
      std::snprintf(emp, sizeof emp, "E%05d", pick_employee(rng));
      r.employee_id = emp;
      const auto& peak = spec.peaks[static_cast<std::size_t>(pick_peak(rng))];
      double tod = std::round((peak.time_s + peak.stddev_s * gauss(rng)) / 60.0) * 60.0;
      tod = std::clamp(tod, 0.0, kSecondsPerDay - 60.0);
      const int day = pick_day(rng);
      r.departure_time = Timestamp{epoch.seconds + day * 86400LL + static_cast<std::int64_t>(tod)};
      const double dura = base / spec.drive_speed_mps * congestion_factor_duration(spec.congestion, tod);
      r.arrival_time = Timestamp{r.departure_time.seconds + static_cast<std::int64_t>(std::ceil(dura / 60.0)) * 60};
      r.origin = spec.workplace;
      r.destination_raw = k < 2 ? meta.spot_names[s] : meta.spot_names[s] + " Bldg " + std::to_string(k - 1);
      const double jr = spec.jitter_m * std::sqrt(unit(rng));
      const double jt = 2.0 * std::numbers::pi * unit(rng);
      const GeoPoint g = proj.inverse({planar[s].x + jr * std::cos(jt), planar[s].y + jr * std::sin(jt)});
      r.destination = {std::round(g.lat * 1e7) / 1e7, std::round(g.lon * 1e7) / 1e7};
      r.payment_cents = 1000 + std::llround(base * congestion_factor_distance(spec.congestion, tod) * 0.26);
      pending.push_back({std::move(r), static_cast<int>(s)});
    }
  }
  std::stable_sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
    return a.rec.departure_time < b.rec.departure_time;
  });
  for (auto& p : pending) {
    out.records.push_back(std::move(p.rec));
    meta.record_spot.push_back(p.spot);
  }

  // Road grid over the spots and the workplace.
  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  for (const auto& p : planar) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double sp = spec.grid_spacing_m;
  const long long i0 = static_cast<long long>(std::floor((min_x - spec.grid_margin_m) / sp));
  const long long i1 = static_cast<long long>(std::ceil((max_x + spec.grid_margin_m) / sp));
  const long long j0 = static_cast<long long>(std::floor((min_y - spec.grid_margin_m) / sp));
  const long long j1 = static_cast<long long>(std::ceil((max_y + spec.grid_margin_m) / sp));
  const long long cols = i1 - i0 + 1;
  auto node_id = [&](long long i, long long j) { return (j - j0) * cols + (i - i0); };
  for (long long j = j0; j <= j1; ++j) {
    for (long long i = i0; i <= i1; ++i) {
      const GeoPoint g = proj.inverse({static_cast<double>(i) * sp, static_cast<double>(j) * sp});
      out.network.add_node(node_id(i, j), {std::round(g.lat * 1e7) / 1e7, std::round(g.lon * 1e7) / 1e7});
    }
  }
  const ModeMask both = mode_bit(TravelMode::kWalk) | mode_bit(TravelMode::kDrive);
  auto connect = [&](long long a, long long b) {
    const int ia = *out.network.index_of(a);
    const int ib = *out.network.index_of(b);
    // Rounded up to the centimeter so it never undercuts the great circle.
    const double len = std::ceil(haversine_m(out.network.location(ia), out.network.location(ib)) * 100.0) / 100.0;
    out.network.add_edge(a, b, len, both);
    out.network.add_edge(b, a, len, both);
  };
  for (long long j = j0; j <= j1; ++j) {
    for (long long i = i0; i <= i1; ++i) {
      if (i < i1) connect(node_id(i, j), node_id(i + 1, j));
      if (j < j1) connect(node_id(i, j), node_id(i, j + 1));
    }
  }

  // Profiles: L-shaped grid paths, inflated by the congestion schedule.
  auto add_leg = [&](const std::string& from_ref, const PlanarPoint& a, const std::string& to_ref,
                     const PlanarPoint& b, double step) {
    TravelTimeProfile prof{from_ref, to_ref, {}};
    const double dist = std::max(manhattan(a, b), 1.0);
    const std::vector<GeoPoint> line{proj.inverse(a), proj.inverse({b.x, a.y}), proj.inverse(b)};
    const auto n = static_cast<long long>(std::floor((spec.profile_end_s - spec.profile_start_s) / step + 1e-9));
    for (long long i = 0; i <= n; ++i) {
      const double t = spec.profile_start_s + static_cast<double>(i) * step;
      ProfileSample s;
      s.depart_s = t;
      s.duration_s = dist / spec.drive_speed_mps * congestion_factor_duration(spec.congestion, t);
      s.distance_m = dist * congestion_factor_distance(spec.congestion, t);
      s.polyline = line;
      prof.samples.push_back(std::move(s));
    }
    out.profiles.add(std::move(prof));
  };
  const PlanarPoint origin{0.0, 0.0};
  for (std::size_t s = 0; s < planar.size(); ++s) {
    add_leg(kWorkplaceRef, origin, meta.spot_names[s], planar[s], spec.first_leg_step_s);
  }
  for (std::size_t a = 0; a < planar.size(); ++a) {
    for (std::size_t b = 0; b < planar.size(); ++b) {
      if (a == b || meta.spot_direction[a] != meta.spot_direction[b]) continue;
      if (manhattan(origin, planar[b]) < manhattan(origin, planar[a])) continue;
      add_leg(meta.spot_names[a], planar[a], meta.spot_names[b], planar[b], spec.inter_stop_step_s);
    }
  }
  return out;
}

std::string metadata_json(const SyntheticMetadata& meta) {
  nlohmann::ordered_json j;
  j["seed"] = meta.seed;
  j["direction_labels"] = meta.direction_labels;
  j["direction_bearings_deg"] = meta.direction_bearings_deg;
  auto& peaks = j["peaks"] = nlohmann::ordered_json::array();
  for (const auto& p : meta.peaks) {
    peaks.push_back({{"time", format_time_of_day(p.time_s)}, {"stddev_s", p.stddev_s}, {"weight", p.weight}});
  }
  auto& cong = j["congestion"] = nlohmann::ordered_json::array();
  for (const auto& c : meta.congestion) {
    cong.push_back({{"time", format_time_of_day(c.time_s)},
                    {"duration_factor", c.duration_factor},
                    {"distance_factor", c.distance_factor}});
  }
  auto& spots = j["spots"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < meta.spot_names.size(); ++i) {
    spots.push_back({{"name", meta.spot_names[i]},
                     {"lat", meta.spot_locations[i].lat},
                     {"lon", meta.spot_locations[i].lon},
                     {"direction", meta.spot_direction[i]}});
  }
  j["record_spot"] = meta.record_spot;
  return j.dump();
}

void write_dataset(const SyntheticDataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw PlanError("io_error", "cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("trips.csv");
    write_trips(f, data.records);
  }
  {
    auto f = open("nodes.csv");
    write_nodes(f, data.network);
  }
  {
    auto f = open("edges.csv");
    write_edges(f, data.network);
  }
  {
    auto f = open("profiles.json");
    write_profiles_json(f, data.profiles);
  }
  {
    auto f = open("metadata.json");
    f << metadata_json(data.metadata) << '\n';
  }
}

}  // namespace shuttleplan
