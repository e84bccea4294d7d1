#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "shuttleplan/geo.hpp"

namespace shuttleplan {

// Reference used for the workplace end of first legs. Stop references are the
// canonical drop-off spot names.
inline constexpr const char* kWorkplaceRef = "workplace";

struct ProfileSample {
  double depart_s = 0.0;  // seconds since midnight
  double duration_s = 0.0;
  double distance_m = 0.0;
  std::vector<GeoPoint> polyline;
};

// Pre-sampled driving legs for one ordered stop pair, indexed by departure
// time of day.
struct TravelTimeProfile {
  std::string from_ref;
  std::string to_ref;
  std::vector<ProfileSample> samples;  // strictly increasing depart_s
};

class TravelTimeProfiles {
 public:
  // Validates ordering and positivity; replaces an existing leg.
  void add(TravelTimeProfile profile);

  const TravelTimeProfile* find(const std::string& from_ref, const std::string& to_ref) const;
  std::size_t size() const { return legs_.size(); }
  bool empty() const { return legs_.empty(); }

  // Every leg shifted by `delta_s`; used for time-translation checks.
  TravelTimeProfiles shifted(double delta_s) const;

  const std::map<std::pair<std::string, std::string>, TravelTimeProfile>& legs() const { return legs_; }

 private:
  std::map<std::pair<std::string, std::string>, TravelTimeProfile> legs_;
};

// profiles.json: {"legs":[{"from":..,"to":..,"samples":[{"depart":"21:30",
// "duration_s":..,"distance_m":..,"polyline":[[lat,lon],...]}]}]}.
// A bare top-level array of legs is accepted too.
TravelTimeProfiles read_profiles_json(std::istream& in);
void write_profiles_json(std::ostream& out, const TravelTimeProfiles& profiles);

}  // namespace shuttleplan
