#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "shuttleplan/network.hpp"
#include "shuttleplan/profiles.hpp"
#include "shuttleplan/trips.hpp"

namespace shuttleplan {

struct DeparturePeak {
  double time_s = 0.0;  // time of day
  double stddev_s = 240.0;
  double weight = 1.0;
};

// Multiplicative inflation of driving legs by departure time; piecewise
// linear between points, flat outside them.
struct CongestionPoint {
  double time_s = 0.0;
  double duration_factor = 1.0;
  double distance_factor = 1.0;
};

struct SyntheticSpec {
  GeoPoint workplace{22.54, 113.93};
  int directions = 9;
  double first_bearing_deg = 10.0;
  double spread_deg = 8.0;  // full angular width of each planted direction
  int neighbourhoods_per_direction = 3;
  int spots_per_neighbourhood = 4;
  double neighbourhood_radius_m = 500.0;
  double min_distance_m = 3000.0;
  double max_distance_m = 9000.0;
  double min_spot_separation_m = 250.0;
  double jitter_m = 40.0;
  int min_orders = 3;
  int max_orders = 25;
  int employees = 400;
  std::vector<DeparturePeak> peaks{{21.5 * 3600, 240.0, 0.6}, {(21 * 60 + 55) * 60.0, 240.0, 0.4}};
  int days = 20;
  std::string start_date = "2021-03-01";
  double grid_spacing_m = 250.0;
  double grid_margin_m = 750.0;
  double drive_speed_mps = 30.0 / 3.6;
  std::vector<CongestionPoint> congestion{
      {21 * 3600.0, 1.18, 1.30}, {(21 * 60 + 45) * 60.0, 1.18, 1.30}, {(21 * 60 + 50) * 60.0, 1.0, 1.0}};
  double profile_start_s = 21 * 3600.0;
  double profile_end_s = 22.5 * 3600;
  double first_leg_step_s = 300.0;
  double inter_stop_step_s = 60.0;
};

struct SyntheticMetadata {
  std::uint64_t seed = 0;
  std::vector<std::string> direction_labels;
  std::vector<double> direction_bearings_deg;  // planted centers
  std::vector<DeparturePeak> peaks;
  std::vector<CongestionPoint> congestion;
  std::vector<std::string> spot_names;      // planted spots
  std::vector<GeoPoint> spot_locations;
  std::vector<int> spot_direction;          // planted spot -> direction index
  std::vector<int> record_spot;             // trip record -> planted spot
};

struct SyntheticDataset {
  std::vector<TripRecord> records;
  RoadNetwork network;
  TravelTimeProfiles profiles;
  SyntheticMetadata metadata;
};

// Planted directions, each a fan of neighbourhoods of spots; a walk+drive
// grid covering them; profiles for workplace -> spot and for outward spot
// pairs inside one direction. Same spec and seed give identical output.
// Throws PlanError("invalid_spec") for directions < 1 or empty mixtures.
SyntheticDataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

double congestion_factor_duration(const std::vector<CongestionPoint>& schedule, double time_s);
double congestion_factor_distance(const std::vector<CongestionPoint>& schedule, double time_s);

// trips.csv, nodes.csv, edges.csv, profiles.json, metadata.json.
void write_dataset(const SyntheticDataset& data, const std::filesystem::path& dir);

std::string metadata_json(const SyntheticMetadata& meta);

}  // namespace shuttleplan
