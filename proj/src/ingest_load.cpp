#include <cstdio>

#include "airgrid/csv.hpp"
#include "airgrid/errors.hpp"
#include "airgrid/ingest.hpp"

namespace airgrid {

namespace {

std::string at_line(const csv::Reader& r) {
  return "'" + r.path() + "' line " + std::to_string(r.line_number());
}

void expect_fields(const csv::Reader& r, const std::vector<std::string>& f, size_t n) {
  if (f.size() != n)
    throw ValidationError(at_line(r) + ": expected " + std::to_string(n) + " fields, got " +
                          std::to_string(f.size()));
}

}  // namespace

std::vector<Measurement> load_measurements(const std::string& path) {
  csv::Reader r(path);
  std::vector<Measurement> out;
  std::vector<std::string> f;
  while (r.next(f)) {
    expect_fields(r, f, 4);
    Measurement m;
    m.station_id = f[0];
    m.pollutant = pollutant_from_string(f[1]);
    m.timestamp = parse_iso_hour(f[2]);
    m.value = csv::parse_double(f[3], at_line(r));
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<StationSite> load_stations(const std::string& path, const StudyArea& area) {
  csv::Reader r(path);
  std::vector<StationSite> out;
  std::vector<std::string> f;
  while (r.next(f)) {
    expect_fields(r, f, 5);
    const Point p{csv::parse_double(f[3], at_line(r)), csv::parse_double(f[4], at_line(r))};
    out.push_back(
        area.make_station(f[0], f[1], environment_class_from_string(f[2]), p));
  }
  return out;
}

std::vector<Point> parse_wkt_linestring(const std::string& wkt) {
  const size_t open = wkt.find('(');
  const size_t close = wkt.rfind(')');
  if (wkt.compare(0, 10, "LINESTRING") != 0 || open == std::string::npos ||
      close == std::string::npos || close <= open)
    throw ValidationError("bad WKT LINESTRING: '" + wkt + "'");
  std::vector<Point> pts;
  const std::string body = wkt.substr(open + 1, close - open - 1);
  size_t pos = 0;
  while (pos < body.size()) {
    size_t next = body.find(',', pos);
    if (next == std::string::npos) next = body.size();
    double x, y;
    if (std::sscanf(body.substr(pos, next - pos).c_str(), "%lf %lf", &x, &y) != 2)
      throw ValidationError("bad WKT coordinate in '" + wkt + "'");
    pts.push_back({x, y});
    pos = next + 1;
  }
  if (pts.size() < 2) throw ValidationError("WKT LINESTRING needs >= 2 points");
  return pts;
}

std::string format_wkt_linestring(const std::vector<Point>& polyline) {
  std::string out = "LINESTRING (";
  char buf[64];
  for (size_t i = 0; i < polyline.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g", polyline[i].x, polyline[i].y);
    if (i) out += ", ";
    out += buf;
  }
  out += ")";
  return out;
}

std::vector<RoadSegment> load_roads(const std::string& path) {
  csv::Reader r(path);
  std::vector<RoadSegment> out;
  std::vector<std::string> f;
  while (r.next(f)) {
    expect_fields(r, f, 3);
    RoadSegment seg;
    seg.segment_id = csv::parse_int(f[0], at_line(r));
    seg.highway_type = highway_type_from_string(f[1]);
    seg.polyline = parse_wkt_linestring(f[2]);
    if (polyline_length(seg.polyline) <= 0.0)
      throw ValidationError(at_line(r) + ": zero-length segment");
    out.push_back(std::move(seg));
  }
  return out;
}

TrafficMeans load_traffic_means(const std::string& path) {
  csv::Reader r(path);
  TrafficMeans means;
  std::vector<std::string> f;
  while (r.next(f)) {
    expect_fields(r, f, 4);
    means.set(f[0], highway_type_from_string(f[1]), transport_mode_from_string(f[2]),
              csv::parse_double(f[3], at_line(r)));
  }
  return means;
}

TravelProfiles load_travel_profiles(const std::string& path) {
  csv::Reader r(path);
  TravelProfiles profiles;
  std::vector<std::string> f;
  while (r.next(f)) {
    expect_fields(r, f, 3 + 24);
    std::array<double, 24> w;
    for (int h = 0; h < 24; ++h) w[h] = csv::parse_double(f[3 + h], at_line(r));
    profiles.set(f[0], day_kind_from_string(f[1]), transport_mode_from_string(f[2]), w);
  }
  return profiles;
}

MetSamples load_met_samples(const std::string& path) {
  csv::Reader r(path);
  MetSamples samples;
  std::vector<std::string> f;
  while (r.next(f)) {
    expect_fields(r, f, 5);
    const int var = met_variable_index(f[0]);
    PointSample s;
    s.x = csv::parse_double(f[1], at_line(r));
    s.y = csv::parse_double(f[2], at_line(r));
    s.value = csv::parse_double(f[4], at_line(r));
    samples.add(var, parse_iso_hour(f[3]), s);
  }
  return samples;
}

std::vector<RemoteSensingSample> load_remote_sensing(const std::string& path) {
  csv::Reader r(path);
  std::vector<RemoteSensingSample> out;
  std::vector<std::string> f;
  while (r.next(f)) {
    expect_fields(r, f, 4);
    RemoteSensingSample s;
    s.variable = remote_sensing_variable_index(f[0]);
    s.cell = csv::parse_int(f[1], at_line(r));
    s.month = static_cast<int>(csv::parse_int(f[2], at_line(r)));
    s.value = csv::parse_double(f[3], at_line(r));
    out.push_back(s);
  }
  return out;
}

EmissionsMap load_emissions(const std::string& annual_path, const std::string& hour_path,
                            const std::string& month_path, size_t n_cells) {
  EmissionsMap map(n_cells);
  {
    csv::Reader r(annual_path);
    std::vector<std::string> f;
    while (r.next(f)) {
      expect_fields(r, f, 4);
      map.add_annual(emission_species_from_string(f[0]),
                     static_cast<int>(csv::parse_int(f[1], at_line(r))),
                     csv::parse_int(f[2], at_line(r)),
                     csv::parse_double(f[3], at_line(r)));
    }
  }
  {
    csv::Reader r(hour_path);
    std::vector<std::string> f;
    while (r.next(f)) {
      expect_fields(r, f, 1 + 168);
      std::array<double, 168> factors;
      for (int i = 0; i < 168; ++i) factors[i] = csv::parse_double(f[1 + i], at_line(r));
      map.set_hour_factors(static_cast<int>(csv::parse_int(f[0], at_line(r))), factors);
    }
  }
  {
    csv::Reader r(month_path);
    std::vector<std::string> f;
    while (r.next(f)) {
      expect_fields(r, f, 2 + 12);
      std::array<double, 12> factors;
      for (int i = 0; i < 12; ++i) factors[i] = csv::parse_double(f[2 + i], at_line(r));
      map.set_month_factors(emission_species_from_string(f[0]),
                            static_cast<int>(csv::parse_int(f[1], at_line(r))), factors);
    }
  }
  return map;
}

LandUseProfiles load_land_use(const std::string& path, size_t n_cells) {
  csv::Reader r(path);
  LandUseProfiles profiles(n_cells);
  std::vector<std::string> f;
  while (r.next(f)) {
    expect_fields(r, f, 1 + kNumLandUseClasses);
    std::array<int32_t, kNumLandUseClasses> counts;
    for (int i = 0; i < kNumLandUseClasses; ++i)
      counts[i] = static_cast<int32_t>(csv::parse_int(f[1 + i], at_line(r)));
    profiles.set(csv::parse_int(f[0], at_line(r)), counts);
  }
  return profiles;
}

std::map<CellId, std::string> load_region_membership(const std::string& path) {
  csv::Reader r(path);
  std::map<CellId, std::string> out;
  std::vector<std::string> f;
  while (r.next(f)) {
    expect_fields(r, f, 2);
    out[csv::parse_int(f[0], at_line(r))] = f[1];
  }
  return out;
}

}  // namespace airgrid
