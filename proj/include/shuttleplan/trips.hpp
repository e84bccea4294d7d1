#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "shuttleplan/geo.hpp"
#include "shuttleplan/time.hpp"

namespace shuttleplan {

// One reimbursed car-hailing trip from the workplace to a home destination.
struct TripRecord {
  std::string employee_id;
  Timestamp departure_time;
  Timestamp arrival_time;
  GeoPoint origin;
  std::string destination_raw;
  GeoPoint destination;
  std::int64_t payment_cents = 0;

  friend bool operator==(const TripRecord&, const TripRecord&) = default;
};

struct RejectedRow {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string reason;
};

struct TripParseResult {
  std::vector<TripRecord> records;
  std::vector<RejectedRow> rejects;
};

struct TripParseOptions {
  // Origins farther than this from the workplace violate the single-origin
  // assumption and are rejected.
  double workplace_tolerance_m = 100.0;
};

inline constexpr const char* kTripsHeader =
    "employee_id,departure_time,arrival_time,origin_lat,origin_lon,dest_name,dest_lat,dest_lon,payment";

// Reads trips.csv. A header that does not match kTripsHeader throws
// FormatError; bad rows end up in `rejects` with their line number.
TripParseResult parse_trips(std::istream& in, const GeoPoint& workplace, const TripParseOptions& options = {});

void write_trips(std::ostream& out, const std::vector<TripRecord>& records);

// "12.50" style amount; at most two decimals, non-negative.
std::string format_payment(std::int64_t cents);

// Manual calibration: raw destination label -> corrected location.
using LocationOverrides = std::map<std::string, GeoPoint>;

LocationOverrides read_overrides(std::istream& in);

// Replaces the destination of every record whose raw label has an override.
// Returns the number of records changed.
std::size_t apply_overrides(std::vector<TripRecord>& records, const LocationOverrides& overrides);

// A unified destination with its demand.
struct DropOffSpot {
  int spot_id = 0;
  GeoPoint location;
  std::string name;
  int order_count = 0;

  friend bool operator==(const DropOffSpot&, const DropOffSpot&) = default;
};

struct Unification {
  std::vector<DropOffSpot> spots;
  std::vector<int> record_spot;  // input index -> spot_id
};

// A labelled location carrying `weight` orders; the unit of unification.
struct WeightedPlace {
  GeoPoint location;
  std::string label;
  int weight = 1;
};

inline constexpr double kDefaultUnifyRadiusM = 150.0;

// Single-linkage grouping: places connected by a chain of pairwise
// great-circle distances <= radius_m form one spot. Location is the
// weight-weighted centroid, name the most frequent label (ties go to the
// lexicographically smallest), spot ids follow first appearance. Grouping is
// repeated on the resulting spots until no two are within radius_m.
Unification unify_places(const std::vector<WeightedPlace>& places, double radius_m = kDefaultUnifyRadiusM);

Unification unify_locations(const std::vector<TripRecord>& records, double radius_m = kDefaultUnifyRadiusM);

}  // namespace shuttleplan
