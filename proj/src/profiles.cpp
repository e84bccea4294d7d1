#include "shuttleplan/profiles.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "json.hpp"

#include "shuttleplan/errors.hpp"
#include "shuttleplan/time.hpp"

namespace shuttleplan {

using nlohmann::json;

void TravelTimeProfiles::add(TravelTimeProfile profile) {
  const std::string leg = profile.from_ref + " -> " + profile.to_ref;
  if (profile.samples.empty()) throw PlanError("invalid_profile", "profile " + leg + " has no samples");
  for (std::size_t i = 0; i < profile.samples.size(); ++i) {
    const auto& s = profile.samples[i];
    if (!(s.duration_s > 0.0) || !(s.distance_m > 0.0) || !std::isfinite(s.depart_s)) {
      throw PlanError("invalid_profile", "profile " + leg + " has a non-positive sample");
    }
    if (i > 0 && !(profile.samples[i - 1].depart_s < s.depart_s)) {
      throw PlanError("invalid_profile", "profile " + leg + " samples are not strictly increasing in time");
    }
  }
  auto key = std::make_pair(profile.from_ref, profile.to_ref);
  legs_.insert_or_assign(std::move(key), std::move(profile));
}

const TravelTimeProfile* TravelTimeProfiles::find(const std::string& from_ref, const std::string& to_ref) const {
  auto it = legs_.find({from_ref, to_ref});
  return it == legs_.end() ? nullptr : &it->second;
}

TravelTimeProfiles TravelTimeProfiles::shifted(double delta_s) const {
  TravelTimeProfiles out;
  for (const auto& [key, leg] : legs_) {
    TravelTimeProfile copy = leg;
    for (auto& s : copy.samples) s.depart_s += delta_s;
    out.legs_.emplace(key, std::move(copy));
  }
  return out;
}

TravelTimeProfiles read_profiles_json(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("profiles.json: ") + e.what());
  }
  const json* legs = &doc;
  if (doc.is_object()) {
    if (!doc.contains("legs")) throw FormatError("profiles.json: missing 'legs'");
    legs = &doc.at("legs");
  }
  if (!legs->is_array()) throw FormatError("profiles.json: legs must be an array");

  TravelTimeProfiles out;
  try {
    for (const auto& leg : *legs) {
      TravelTimeProfile p;
      p.from_ref = leg.at("from").get<std::string>();
      p.to_ref = leg.at("to").get<std::string>();
      for (const auto& s : leg.at("samples")) {
        ProfileSample sample;
        const auto& depart = s.at("depart");
        sample.depart_s = depart.is_string() ? parse_time_of_day(depart.get<std::string>()) : depart.get<double>();
        sample.duration_s = s.at("duration_s").get<double>();
        sample.distance_m = s.at("distance_m").get<double>();
        if (s.contains("polyline")) {
          for (const auto& pt : s.at("polyline")) {
            sample.polyline.push_back(GeoPoint{pt.at(0).get<double>(), pt.at(1).get<double>()});
          }
        }
        p.samples.push_back(std::move(sample));
      }
      out.add(std::move(p));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("profiles.json: ") + e.what());
  }
  return out;
}

void write_profiles_json(std::ostream& out, const TravelTimeProfiles& profiles) {
  json legs = json::array();
  for (const auto& [key, leg] : profiles.legs()) {
    json samples = json::array();
    for (const auto& s : leg.samples) {
      json line = json::array();
      for (const auto& p : s.polyline) line.push_back({p.lat, p.lon});
      const json depart = s.depart_s == std::floor(s.depart_s) ? json(format_time_of_day_short(s.depart_s))
                                                             : json(s.depart_s);
      samples.push_back({{"depart", depart},
                         {"duration_s", s.duration_s},
                         {"distance_m", s.distance_m},
                         {"polyline", std::move(line)}});
    }
    legs.push_back({{"from", leg.from_ref}, {"to", leg.to_ref}, {"samples", std::move(samples)}});
  }
  out << json{{"legs", std::move(legs)}}.dump() << '\n';
}

}  // namespace shuttleplan
