#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "oracles.hpp"
#include "shuttleplan/errors.hpp"
#include "shuttleplan/route.hpp"
#include "shuttleplan/synthetic.hpp"

using namespace shuttleplan;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

SyntheticSpec small_spec() {
  SyntheticSpec spec;
  spec.directions = 4;
  spec.neighbourhoods_per_direction = 2;
  spec.spots_per_neighbourhood = 3;
  spec.employees = 150;
  spec.days = 5;
  return spec;
}

}  // namespace

TEST(Synthetic, SameSeedWritesIdenticalBytes) {
  const fs::path root = fs::temp_directory_path() / ("shuttleplan_synth_" + std::to_string(::getpid()));
  fs::remove_all(root);
  write_dataset(generate_synthetic(small_spec(), 7), root / "a");
  write_dataset(generate_synthetic(small_spec(), 7), root / "b");
  write_dataset(generate_synthetic(small_spec(), 8), root / "c");
  for (const char* f : {"trips.csv", "nodes.csv", "edges.csv", "profiles.json", "metadata.json"}) {
    const auto a = slurp(root / "a" / f);
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, slurp(root / "b" / f)) << f;
  }
  EXPECT_NE(slurp(root / "a" / "trips.csv"), slurp(root / "c" / "trips.csv"));
  fs::remove_all(root);
}

TEST(Synthetic, NineLabelledDirections) {
  SyntheticSpec spec;
  spec.days = 3;
  spec.employees = 100;
  const auto data = generate_synthetic(spec, 1);
  ASSERT_EQ(data.metadata.direction_labels.size(), 9u);
  EXPECT_EQ(data.metadata.direction_labels.front(), "D0");
  EXPECT_EQ(data.metadata.direction_labels.back(), "D8");
  for (std::size_t i = 0; i < data.metadata.spot_locations.size(); ++i) {
    const double b = bearing_deg(spec.workplace, data.metadata.spot_locations[i]);
    const double centre = data.metadata.direction_bearings_deg[static_cast<std::size_t>(data.metadata.spot_direction[i])];
    EXPECT_LE(std::abs(angle_diff_deg(centre, b)), spec.spread_deg / 2 + 1e-9);
    const double r = haversine_m(spec.workplace, data.metadata.spot_locations[i]);
    EXPECT_GE(r, spec.min_distance_m - spec.neighbourhood_radius_m - spec.jitter_m);
  }
}

TEST(Synthetic, PlantedSpotsSurviveUnificationAndWalkRouting) {
  const auto spec = small_spec();
  const auto data = generate_synthetic(spec, 3);
  const auto u = unify_locations(data.records);
  ASSERT_EQ(u.spots.size(), data.metadata.spot_names.size());
  // Unified spot ids and planted spot ids describe the same partition.
  EXPECT_DOUBLE_EQ(oracle::adjusted_rand(u.record_spot, data.metadata.record_spot), 1.0);
  for (const auto& s : u.spots) {
    EXPECT_NE(std::find(data.metadata.spot_names.begin(), data.metadata.spot_names.end(), s.name),
              data.metadata.spot_names.end());
  }
  const auto walk = walk_shortest(data.network, u.spots);
  for (std::size_t i = 0; i < walk.size(); ++i)
    for (std::size_t j = 0; j < walk.size(); ++j) EXPECT_LT(walk.dist_at(i, j), kUnreachable);
}

TEST(Synthetic, PlantedCongestionOnFirstLegs) {
  const auto spec = small_spec();
  const auto data = generate_synthetic(spec, 4);
  const double early = parse_time_of_day("21:30"), late = parse_time_of_day("21:55");
  EXPECT_DOUBLE_EQ(congestion_factor_duration(spec.congestion, early), 1.18);
  EXPECT_DOUBLE_EQ(congestion_factor_distance(spec.congestion, early), 1.30);
  EXPECT_DOUBLE_EQ(congestion_factor_duration(spec.congestion, late), 1.0);
  EXPECT_NEAR(congestion_factor_duration(spec.congestion, parse_time_of_day("21:47:30")), 1.09, 1e-12);
  for (const auto& name : data.metadata.spot_names) {
    const auto a = drive_leg(data.profiles, kWorkplaceRef, name, early);
    const auto b = drive_leg(data.profiles, kWorkplaceRef, name, late);
    EXPECT_NEAR(a.duration_s / b.duration_s, 1.18, 1e-9) << name;
    EXPECT_NEAR(a.distance_m / b.distance_m, 1.30, 1e-9) << name;
  }
}

TEST(Synthetic, DepartureHistogramHasPlantedPeaks) {
  SyntheticSpec spec;
  spec.directions = 3;
  spec.employees = 300;
  spec.days = 20;
  const auto data = generate_synthetic(spec, 9);
  const auto h = departure_histogram(data.records, 5);
  long long total = 0;
  for (const auto& b : h) total += b.count;
  EXPECT_EQ(total, static_cast<long long>(data.records.size()));
  auto count_at = [&](const char* hhmm) {
    for (const auto& b : h)
      if (b.start_s == parse_time_of_day(hhmm)) return b.count;
    return 0LL;
  };
  EXPECT_GT(count_at("21:30"), count_at("21:40"));
  EXPECT_GT(count_at("21:55"), count_at("21:40"));
  EXPECT_GT(count_at("21:30"), count_at("21:20"));
  EXPECT_GT(count_at("21:55"), count_at("22:05"));
  EXPECT_GT(count_at("21:30"), count_at("21:55"));
}

TEST(Synthetic, InvalidSpecsAreRejected) {
  auto code_of = [](SyntheticSpec spec) {
    try {
      generate_synthetic(spec, 1);
    } catch (const PlanError& e) {
      return e.code();
    }
    return std::string("none");
  };
  SyntheticSpec none = small_spec();
  none.directions = 0;
  EXPECT_EQ(code_of(none), "invalid_spec");
  SyntheticSpec no_peaks = small_spec();
  no_peaks.peaks.clear();
  EXPECT_EQ(code_of(no_peaks), "invalid_spec");
  SyntheticSpec orders = small_spec();
  orders.min_orders = 5;
  orders.max_orders = 2;
  EXPECT_EQ(code_of(orders), "invalid_spec");
}
