#include "airgrid/worldgen.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "airgrid/csv.hpp"
#include "airgrid/errors.hpp"
#include "airgrid/geometry.hpp"

namespace fs = std::filesystem;

namespace airgrid {

namespace {

uint64_t mix64(uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  return out;
}

}  // namespace

Rng keyed_rng(uint64_t seed, uint64_t stream, uint64_t a, uint64_t b) {
  return Rng(mix64(seed ^ mix64(stream ^ mix64(a ^ mix64(b + 0x9e3779b97f4a7c15ULL)))));
}

uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot hash '" + path + "'");
  uint64_t h = 1469598103934665603ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  return h;
}

int SyntheticWorldSpec::total_stations() const {
  int n = 0;
  for (int c : stations_per_class) n += c;
  return n;
}

double GeneratingFunction::evaluate(std::span<const double> x) const {
  const FeatureSchema& schema = FeatureSchema::full();
  static const size_t i_traffic = schema.index_of("traffic_car_taxi");
  static const size_t i_emis = schema.index_of("emis_nox_s07");
  static const size_t i_wu = schema.index_of("met_wind_u_10m");
  static const size_t i_wv = schema.index_of("met_wind_v_10m");
  static const size_t i_rs = schema.index_of("rs_no2");
  static const size_t i_urban0 = schema.index_of("land_class_00");
  static const size_t i_urban1 = schema.index_of("land_class_01");

  const double traffic = x[i_traffic];
  const double wind_speed = std::hypot(x[i_wu], x[i_wv]);
  const double urban_frac = (x[i_urban0] + x[i_urban1]) / kLandUsePixelsPerCell;
  return base + w_traffic * traffic / (traffic + traffic_scale) +
         w_emissions * std::log1p(std::max(0.0, x[i_emis])) +
         w_calm * std::max(0.0, calm_threshold - wind_speed) +
         w_remote * x[i_rs] / remote_scale + w_urban * urban_frac;
}

namespace {

// ---- world geometry ------------------------------------------------------

struct WorldLayout {
  const SyntheticWorldSpec& spec;
  double urban_row, urban_col, urban_radius;

  explicit WorldLayout(const SyntheticWorldSpec& s)
      : spec(s),
        urban_row(0.72 * s.rows),
        urban_col(0.28 * s.cols),
        urban_radius(0.30 * std::min(s.rows, s.cols)) {}

  double urban_frac(int32_t row, int32_t col) const {
    const double d = std::hypot(row - urban_row, col - urban_col);
    return std::clamp(1.15 - d / urban_radius, 0.0, 1.0);
  }

  std::string region_of(int32_t col) const {
    return col < spec.cols / 2 ? "R_WEST" : "R_EAST";
  }

  double cx(double col) const { return spec.origin_x + col * spec.cell_size; }
  double cy(double row) const { return spec.origin_y + row * spec.cell_size; }
};

std::vector<RoadSegment> build_roads(const WorldLayout& w) {
  const SyntheticWorldSpec& s = w.spec;
  std::vector<RoadSegment> roads;
  int64_t next_id = 1;
  auto add = [&](HighwayType t, std::vector<Point> pts) {
    roads.push_back({next_id++, t, std::move(pts)});
  };

  const double west = w.cx(0.02 * s.cols), east = w.cx(0.55 * s.cols);
  const double far_east = w.cx(0.98 * s.cols);
  // Motorway crossing the full width, dipping near the urban centre.
  const double m_y = w.cy(0.33 * s.rows);
  add(HighwayType::kMotorway,
      {{west, m_y}, {w.cx(0.35 * s.cols), m_y + 0.2 * s.cell_size}, {far_east, m_y}});
  // Trunk running north-south on the eastern half.
  const double t_x = w.cx(0.62 * s.cols);
  add(HighwayType::kTrunk, {{t_x, w.cy(0.02 * s.rows)}, {t_x, w.cy(0.6 * s.rows)}});
  // Primary from the urban centre to the trunk.
  add(HighwayType::kPrimary, {{w.cx(w.urban_col), w.cy(w.urban_row)},
                              {w.cx(0.45 * s.cols), w.cy(0.55 * s.rows)},
                              {t_x, w.cy(0.45 * s.rows)}});
  add(HighwayType::kSecondary, {{w.cx(w.urban_col - 2.5), w.cy(w.urban_row - 2.5)},
                                {w.cx(w.urban_col + 2.5), w.cy(w.urban_row - 2.5)},
                                {w.cx(w.urban_col + 2.5), w.cy(w.urban_row + 2.5)}});
  add(HighwayType::kTertiary,
      {{w.cx(0.1 * s.cols), w.cy(0.5 * s.rows)}, {w.cx(0.3 * s.cols), w.cy(0.62 * s.rows)}});
  add(HighwayType::kUnclassified,
      {{w.cx(0.15 * s.cols), w.cy(0.15 * s.rows)}, {w.cx(0.3 * s.cols), w.cy(0.2 * s.rows)}});
  add(HighwayType::kTrack,
      {{w.cx(0.05 * s.cols), w.cy(0.8 * s.rows)}, {w.cx(0.18 * s.cols), w.cy(0.9 * s.rows)}});
  add(HighwayType::kService, {{w.cx(w.urban_col + 1.2), w.cy(w.urban_row + 0.4)},
                              {w.cx(w.urban_col + 1.8), w.cy(w.urban_row + 0.9)}});
  add(HighwayType::kLivingStreet, {{w.cx(w.urban_col - 1.2), w.cy(w.urban_row + 1.1)},
                                   {w.cx(w.urban_col - 0.6), w.cy(w.urban_row + 1.4)}});

  // Residential street grid over the urban block.
  const int32_t r0 = static_cast<int32_t>(w.urban_row - 3), r1 = static_cast<int32_t>(w.urban_row + 3);
  const int32_t c0 = static_cast<int32_t>(w.urban_col - 3), c1 = static_cast<int32_t>(w.urban_col + 3);
  for (int32_t r = r0; r <= r1; ++r)
    add(HighwayType::kResidential,
        {{w.cx(c0) + 0.5 * s.cell_size, w.cy(r) + 0.5 * s.cell_size},
         {w.cx(c1) + 0.5 * s.cell_size, w.cy(r) + 0.5 * s.cell_size}});
  for (int32_t c = c0; c <= c1; ++c)
    add(HighwayType::kResidential,
        {{w.cx(c) + 0.5 * s.cell_size, w.cy(r0) + 0.5 * s.cell_size},
         {w.cx(c) + 0.5 * s.cell_size, w.cy(r1) + 0.5 * s.cell_size}});

  // Non-motor paths around the centre.
  add(HighwayType::kFootway, {{w.cx(w.urban_col), w.cy(w.urban_row + 0.2)},
                              {w.cx(w.urban_col + 0.8), w.cy(w.urban_row + 0.7)}});
  add(HighwayType::kPath, {{w.cx(w.urban_col - 1.5), w.cy(w.urban_row - 1.2)},
                           {w.cx(w.urban_col - 0.5), w.cy(w.urban_row - 1.8)}});
  add(HighwayType::kCycleway, {{w.cx(w.urban_col - 2), w.cy(w.urban_row)},
                               {w.cx(w.urban_col + 2), w.cy(w.urban_row + 0.3)}});
  add(HighwayType::kPedestrian, {{w.cx(w.urban_col + 0.1), w.cy(w.urban_row - 0.4)},
                                 {w.cx(w.urban_col + 0.5), w.cy(w.urban_row - 0.2)}});
  (void)east;
  return roads;
}

// Station anchor positions (row fraction, col fraction) per environment class.
const std::vector<std::pair<double, double>>& class_anchors(EnvironmentClass c) {
  static const std::vector<std::pair<double, double>> urban_bg = {
      {0.70, 0.23}, {0.78, 0.33}, {0.64, 0.33}, {0.82, 0.22}, {0.74, 0.28}};
  static const std::vector<std::pair<double, double>> urban_traffic = {
      {0.33, 0.18}, {0.34, 0.42}, {0.50, 0.62}, {0.33, 0.30}};
  static const std::vector<std::pair<double, double>> urban_ind = {{0.42, 0.52}, {0.46, 0.56}};
  static const std::vector<std::pair<double, double>> suburban_bg = {{0.88, 0.42}, {0.58, 0.14}};
  static const std::vector<std::pair<double, double>> suburban_ind = {{0.47, 0.12}, {0.52, 0.2}};
  static const std::vector<std::pair<double, double>> rural_bg = {
      {0.12, 0.82}, {0.07, 0.92}, {0.2, 0.88}};
  switch (c) {
    case EnvironmentClass::kUrbanBackground: return urban_bg;
    case EnvironmentClass::kUrbanTraffic: return urban_traffic;
    case EnvironmentClass::kUrbanIndustrial: return urban_ind;
    case EnvironmentClass::kSuburbanBackground: return suburban_bg;
    case EnvironmentClass::kSuburbanIndustrial: return suburban_ind;
    case EnvironmentClass::kRuralBackground: return rural_bg;
  }
  return rural_bg;
}

struct StationPlan {
  std::string id;
  std::string name;
  EnvironmentClass env;
  double x, y;
  bool adversarial;
};

std::vector<StationPlan> plan_stations(const WorldLayout& w) {
  const SyntheticWorldSpec& s = w.spec;
  std::vector<StationPlan> out;
  int idx = 0;
  for (int c = 0; c < 6; ++c) {
    const auto env = static_cast<EnvironmentClass>(c);
    const auto& anchors = class_anchors(env);
    for (int k = 0; k < s.stations_per_class[static_cast<size_t>(c)]; ++k) {
      const auto& [fr, fc] = anchors[static_cast<size_t>(k) % anchors.size()];
      // Fixed off-centroid offsets exercise the snapping path.
      const double jitter_x = ((idx * 73) % 700) - 350.0;
      const double jitter_y = ((idx * 131) % 700) - 350.0;
      StationPlan p;
      ++idx;
      char id[16];
      std::snprintf(id, sizeof id, "ST%02d", idx);
      p.id = id;
      p.name = std::string(to_string(env)) + " " + std::to_string(k + 1);
      p.env = env;
      p.x = std::clamp(w.cx(fc * s.cols) + jitter_x, w.cx(0) + 1.0,
                       w.cx(s.cols) - 1.0);
      p.y = std::clamp(w.cy(fr * s.rows) + jitter_y, w.cy(0) + 1.0,
                       w.cy(s.rows) - 1.0);
      p.adversarial = false;
      out.push_back(std::move(p));
    }
  }
  // The last rural stations get the inverted response.
  int remaining = s.adversarial_stations;
  for (auto it = out.rbegin(); it != out.rend() && remaining > 0; ++it) {
    if (it->env == EnvironmentClass::kRuralBackground) {
      it->adversarial = true;
      --remaining;
    }
  }
  if (remaining > 0)
    throw ValidationError("worldgen: not enough rural stations for the adversarial count");
  return out;
}

// ---- survey fixtures (drives IPF -> travel profiles) ----------------------

SurveySeed build_survey(const SyntheticWorldSpec& spec) {
  SurveySeed seed;
  seed.dimensions = {"age_band", "employment"};
  const std::array<const char*, 3> ages = {"young", "mid", "old"};
  const std::array<const char*, 2> jobs = {"employed", "retired"};
  Rng rng(keyed_rng(spec.seed, 101, 0, 0));
  int idx = 0;
  for (const char* age : ages) {
    for (const char* job : jobs) {
      for (int rep = 0; rep < 6; ++rep) {
        Respondent r;
        char id[16];
        std::snprintf(id, sizeof id, "P%03d", ++idx);
        r.respondent_id = id;
        r.attributes = {age, job};
        const bool worker = std::string(job) == "employed";
        const TransportMode commute =
            std::string(age) == "young"
                ? (rep % 2 == 0 ? TransportMode::kBicycle : TransportMode::kCarTaxi)
                : (rep % 3 == 0 ? TransportMode::kBusCoach : TransportMode::kCarTaxi);
        auto& weekday = r.diary[static_cast<size_t>(DayKind::kWeekday)];
        auto& saturday = r.diary[static_cast<size_t>(DayKind::kSaturday)];
        auto& sunday = r.diary[static_cast<size_t>(DayKind::kSunday)];
        if (worker) {
          weekday[7 + rng.uniform_u64(3)] = commute;
          weekday[16 + rng.uniform_u64(3)] = commute;
          if (rep % 3 == 1) weekday[12] = TransportMode::kLGV;   // delivery rounds
          if (rep % 6 == 2) weekday[10] = TransportMode::kHGV;   // haulage shifts
          if (rep % 6 == 5) weekday[14] = TransportMode::kHGV;
        } else {
          weekday[10 + rng.uniform_u64(4)] = TransportMode::kBusCoach;
        }
        saturday[10 + rng.uniform_u64(5)] = rep % 2 == 0 ? TransportMode::kCarTaxi
                                                         : TransportMode::kBicycle;
        if (rep % 3 == 0) saturday[13] = TransportMode::kLGV;
        if (rep % 4 == 1) saturday[9] = TransportMode::kHGV;
        else if (rep % 4 == 3) saturday[15] = TransportMode::kBusCoach;
        sunday[11 + rng.uniform_u64(4)] = rep % 2 == 0 ? TransportMode::kCarTaxi
                                                       : TransportMode::kBusCoach;
        if (rep % 3 == 2) sunday[14] = TransportMode::kBicycle;
        if (rep % 6 == 4) sunday[10] = TransportMode::kLGV;
        if (rep % 6 == 1) sunday[16] = TransportMode::kHGV;
        seed.respondents.push_back(std::move(r));
      }
    }
  }
  return seed;
}

MarginalConstraints build_marginals() {
  MarginalConstraints m;
  m["R_WEST"]["age_band"] = {{"young", 420.0}, {"mid", 640.0}, {"old", 340.0}};
  m["R_WEST"]["employment"] = {{"employed", 880.0}, {"retired", 520.0}};
  m["R_EAST"]["age_band"] = {{"young", 260.0}, {"mid", 520.0}, {"old", 420.0}};
  m["R_EAST"]["employment"] = {{"employed", 700.0}, {"retired", 500.0}};
  return m;
}

// ---- timestamp helpers -----------------------------------------------------

std::vector<UtcHour> hours_of_years(const std::vector<int>& years) {
  std::vector<UtcHour> out;
  for (int y : years) {
    const UtcHour begin = make_hour(y, 1, 1, 0);
    const UtcHour end = make_hour(y + 1, 1, 1, 0);
    for (int64_t t = begin.value; t < end.value; ++t) out.push_back(UtcHour{t});
  }
  return out;
}

}  // namespace

void generate_world(const SyntheticWorldSpec& spec, const std::string& dir) {
  if (spec.rows < 4 || spec.cols < 4)
    throw ValidationError("worldgen: grid must be at least 4x4");
  if (spec.years.empty()) throw ValidationError("worldgen: no years requested");
  if (spec.measurement_coverage <= 0.0 || spec.measurement_coverage > 1.0)
    throw ValidationError("worldgen: coverage must be in (0, 1]");
  fs::create_directories(dir);

  const WorldLayout layout(spec);
  StudyArea area = build_rect_study_area({spec.origin_x, spec.origin_y}, spec.cell_size,
                                         spec.rows, spec.cols);
  area.save(dir + "/area.csv");

  // --- roads: one snapshot file per year (identical networks) ---
  const std::vector<RoadSegment> roads = build_roads(layout);
  for (int year : spec.years) {
    auto out = open_out(dir + "/roads_" + std::to_string(year) + ".csv");
    out << "segment_id,highway_type,wkt_linestring\n";
    for (const RoadSegment& seg : roads)
      out << seg.segment_id << ',' << to_string(seg.highway_type) << ','
          << csv::quote(format_wkt_linestring(seg.polyline)) << '\n';
  }

  // --- regions ---
  {
    auto out = open_out(dir + "/regions.csv");
    out << "cell_id,region_id\n";
    for (const GridCell& c : area.cells())
      out << c.cell_id << ',' << layout.region_of(c.col) << '\n';
  }

  // --- traffic means ---
  {
    auto out = open_out(dir + "/traffic_means.csv");
    out << "region_id,highway_type,mode,mean_flow_per_meter\n";
    // Daily flow per meter of road by OSM class; east region runs lighter.
    const std::array<std::pair<HighwayType, std::array<double, 5>>, 10> base = {{
        {HighwayType::kMotorway, {0.01, 30.0, 0.40, 6.0, 7.0}},
        {HighwayType::kTrunk, {0.02, 18.0, 0.30, 3.5, 4.0}},
        {HighwayType::kPrimary, {0.05, 11.0, 0.25, 2.0, 1.6}},
        {HighwayType::kSecondary, {0.08, 7.0, 0.20, 1.2, 0.8}},
        {HighwayType::kTertiary, {0.10, 4.5, 0.15, 0.8, 0.4}},
        {HighwayType::kUnclassified, {0.06, 2.0, 0.05, 0.5, 0.2}},
        {HighwayType::kResidential, {0.12, 1.6, 0.04, 0.35, 0.1}},
        {HighwayType::kLivingStreet, {0.15, 0.7, 0.01, 0.15, 0.03}},
        {HighwayType::kService, {0.04, 0.9, 0.02, 0.3, 0.08}},
        {HighwayType::kTrack, {0.02, 0.3, 0.0, 0.1, 0.05}},
    }};
    for (const char* region : {"R_WEST", "R_EAST"}) {
      const double f = std::string(region) == "R_WEST" ? 1.0 : 0.8;
      for (const auto& [type, flows] : base)
        for (int m = 0; m < kNumTransportModes; ++m)
          out << region << ',' << to_string(type) << ','
              << to_string(static_cast<TransportMode>(m)) << ','
              << num6(flows[static_cast<size_t>(m)] * f) << '\n';
    }
  }

  // --- microsimulation: survey -> IPF -> travel profiles ---
  const SurveySeed survey = build_survey(spec);
  const MarginalConstraints marginals = build_marginals();
  {
    auto out = open_out(dir + "/survey.csv");
    out << "respondent_id,age_band,employment\n";
    for (const Respondent& r : survey.respondents)
      out << r.respondent_id << ',' << r.attributes[0] << ',' << r.attributes[1] << '\n';
  }
  {
    auto out = open_out(dir + "/diary.csv");
    out << "respondent_id,day_kind,hour,mode\n";
    for (const Respondent& r : survey.respondents)
      for (int d = 0; d < 3; ++d)
        for (int h = 0; h < 24; ++h) {
          const auto& m = r.diary[static_cast<size_t>(d)][static_cast<size_t>(h)];
          if (m)
            out << r.respondent_id << ',' << to_string(static_cast<DayKind>(d)) << ',' << h
                << ',' << to_string(*m) << '\n';
        }
  }
  {
    auto out = open_out(dir + "/marginals.csv");
    out << "region_id,dimension,category,target_count\n";
    for (const auto& [region, dims] : marginals)
      for (const auto& [dim, cats] : dims)
        for (const auto& [cat, count] : cats)
          out << region << ',' << dim << ',' << cat << ',' << num6(count) << '\n';
  }
  {
    const auto fits = ipf_fit_all(survey, marginals);
    auto out = open_out(dir + "/travel_profiles.csv");
    out << "region_id,day_kind,mode";
    for (int h = 0; h < 24; ++h) {
      char b[8];
      std::snprintf(b, sizeof b, ",h%02d", h);
      out << b;
    }
    out << '\n';
    for (const auto& [region, fit] : fits) {
      for (int d = 0; d < 3; ++d) {
        const auto profile =
            travel_profile_from_weights(survey, fit.weights, static_cast<DayKind>(d));
        for (int m = 0; m < kNumTransportModes; ++m) {
          if (!profile.has_travel[static_cast<size_t>(m)])
            throw ValidationError("worldgen: survey leaves a mode with no travel");
          out << region << ',' << to_string(static_cast<DayKind>(d)) << ','
              << to_string(static_cast<TransportMode>(m));
          for (int h = 0; h < 24; ++h)
            out << ',' << num6(profile.profile[static_cast<size_t>(m)][static_cast<size_t>(h)]);
          out << '\n';
        }
      }
    }
  }

  // --- meteorology samples (site grid just inside the corners) ---
  const std::vector<UtcHour> all_hours = hours_of_years(spec.years);
  {
    std::vector<Point> sites;
    const int per_side = std::max(2, static_cast<int>(std::lround(std::sqrt(spec.met_sites))));
    for (int i = 0; i < per_side && static_cast<int>(sites.size()) < spec.met_sites; ++i)
      for (int j = 0; j < per_side && static_cast<int>(sites.size()) < spec.met_sites; ++j)
        sites.push_back({layout.cx((0.08 + 0.84 * j / (per_side - 1)) * spec.cols),
                         layout.cy((0.08 + 0.84 * i / (per_side - 1)) * spec.rows)});

    auto out = open_out(dir + "/met_samples.csv");
    out << "variable,x,y,timestamp,value\n";
    Rng rng(keyed_rng(spec.seed, 202, 0, 0));
    for (UtcHour t : all_hours) {
      const CalendarParts p = calendar_parts(t);
      const double doy =
          static_cast<double>(t.value / 24 - days_from_civil(p.year, 1, 1)) + 1.0;
      const double seasonal = std::cos(2.0 * M_PI * (doy - 15.0) / 365.0);
      const double diurnal = std::sin(2.0 * M_PI * (p.hour - 14) / 24.0);
      const std::string ts = format_iso_hour(t);
      for (size_t si = 0; si < sites.size(); ++si) {
        const double phase = 0.7 * static_cast<double>(si);
        const double u10 = 2.5 - 2.0 * seasonal + 1.2 * std::sin(2.0 * M_PI * doy / 29.0 + phase) +
                           0.8 * diurnal + rng.normal(0.0, 0.5);
        const double v10 = 0.8 - 1.5 * seasonal + 1.0 * std::cos(2.0 * M_PI * doy / 23.0 + phase) +
                           rng.normal(0.0, 0.5);
        const double u100 = 1.35 * u10 + rng.normal(0.0, 0.25);
        const double v100 = 1.35 * v10 + rng.normal(0.0, 0.25);
        const double temp = 10.0 - 8.5 * seasonal + 3.0 * diurnal + 0.4 * phase +
                            rng.normal(0.0, 0.7);
        const double dew = temp - 2.5 - std::fabs(rng.normal(0.0, 1.2));
        const double blh = std::max(
            60.0, 420.0 + 330.0 * diurnal - 120.0 * seasonal + rng.normal(0.0, 45.0));
        const double uv =
            std::max(0.0, std::sin(M_PI * (p.hour - 6) / 12.0)) * (420.0 - 260.0 * seasonal) +
            rng.normal(0.0, 8.0);
        const double gust = std::hypot(u10, v10) * 1.45 + std::fabs(rng.normal(0.0, 0.8));
        const double pressure =
            1013.0 + 7.5 * std::sin(2.0 * M_PI * doy / 31.0 + phase) + rng.normal(0.0, 1.5);
        const double rain = std::max(0.0, 0.7 - 0.4 * seasonal + rng.normal(0.0, 0.45));
        const std::array<double, kNumMetVariables> values = {
            u100, v100, u10, v10, dew, temp, blh, std::max(0.0, uv), gust, pressure, rain};
        for (int v = 0; v < kNumMetVariables; ++v)
          out << kMetVariableNames[v] << ',' << num6(sites[si].x) << ',' << num6(sites[si].y)
              << ',' << ts << ',' << num6(values[static_cast<size_t>(v)]) << '\n';
      }
    }
  }

  // --- remote sensing monthly values with a sprinkling of holes ---
  {
    auto out = open_out(dir + "/remote_sensing.csv");
    out << "variable,cell_id,month,value\n";
    const std::array<double, kNumRemoteSensingVariables> base = {40.0, 22.0, 9.0, 55.0, 1.1};
    const std::array<double, kNumRemoteSensingVariables> urban_gain = {1.0, 0.7, 0.5, -0.35,
                                                                       0.6};
    for (const GridCell& c : area.cells()) {
      const double uf = layout.urban_frac(c.row, c.col);
      for (int v = 0; v < kNumRemoteSensingVariables; ++v) {
        for (int month = 1; month <= 12; ++month) {
          Rng r = keyed_rng(spec.seed, 303, static_cast<uint64_t>(c.cell_id),
                            static_cast<uint64_t>(v * 100 + month));
          if (r.uniform01() < 0.01) continue;  // hole: exercises the gap fill
          const double seasonal = std::cos(2.0 * M_PI * (month - 1.5) / 12.0);
          const double value = base[static_cast<size_t>(v)] *
                                   (1.0 + urban_gain[static_cast<size_t>(v)] * uf) *
                                   (1.0 + 0.18 * seasonal) +
                               r.normal(0.0, 0.02 * base[static_cast<size_t>(v)]);
          out << kRemoteSensingVariableNames[v] << ',' << c.cell_id << ',' << month << ','
              << num6(std::max(0.0, value)) << '\n';
        }
      }
    }
  }

  // --- emissions: annual map + scaling tables ---
  {
    const std::vector<RoadSegment>& net = roads;
    std::vector<double> road_prox(area.cell_count(), 0.0);
    for (const GridCell& c : area.cells()) {
      const Point centroid{c.centroid_x, c.centroid_y};
      double d_major = std::numeric_limits<double>::infinity();
      for (const RoadSegment& seg : net) {
        if (seg.highway_type != HighwayType::kMotorway &&
            seg.highway_type != HighwayType::kTrunk &&
            seg.highway_type != HighwayType::kPrimary)
          continue;
        d_major = std::min(d_major, point_polyline_distance(centroid, seg.polyline));
      }
      road_prox[static_cast<size_t>(c.cell_id)] =
          std::isfinite(d_major) ? std::max(0.0, 1.0 - d_major / 3000.0) : 0.0;
    }

    const std::array<double, kNumEmissionSpecies> species_base = {2.0, 3.0, 5.0, 1.5,
                                                                  1.0, 20.0, 10.0};
    auto out = open_out(dir + "/emissions_annual.csv");
    out << "species,snap_sector,cell_id,annual_value\n";
    for (const GridCell& c : area.cells()) {
      const double uf = layout.urban_frac(c.row, c.col);
      const double prox = road_prox[static_cast<size_t>(c.cell_id)];
      for (int sp = 0; sp < kNumEmissionSpecies; ++sp) {
        for (int sec = 1; sec <= kNumSnapSectors; ++sec) {
          double w;
          switch (sec) {
            case 7: w = 1.5 * prox + 0.3 * uf; break;              // road transport
            case 8: w = 0.8 * prox; break;                         // other transport
            case 2: w = 1.2 * uf; break;                           // residential combustion
            case 6: w = 0.9 * uf; break;                           // solvents
            case 10: w = 1.0 - uf; break;                          // agriculture
            case 11: w = 0.6 * (1.0 - uf); break;                  // nature
            default: w = 0.15 + 0.55 * uf; break;
          }
          if (w <= 0.0) continue;
          Rng r = keyed_rng(spec.seed, 404, static_cast<uint64_t>(c.cell_id),
                            static_cast<uint64_t>(sp * 16 + sec));
          const double value =
              species_base[static_cast<size_t>(sp)] * w * (0.9 + 0.2 * r.uniform01());
          out << to_string(static_cast<EmissionSpecies>(sp)) << ',' << sec << ','
              << c.cell_id << ',' << num6(value) << '\n';
        }
      }
    }
  }
  {
    auto out = open_out(dir + "/emissions_hour_factors.csv");
    out << "snap_sector";
    for (int i = 0; i < 168; ++i) {
      char b[8];
      std::snprintf(b, sizeof b, ",wh%03d", i);
      out << b;
    }
    out << '\n';
    for (int sec = 1; sec <= kNumSnapSectors; ++sec) {
      out << sec;
      for (int wh = 0; wh < 168; ++wh) {
        const int dow = wh / 24, h = wh % 24;
        double f;
        if (sec == 7 || sec == 8) {
          // commuter double peak, muted at weekends
          const double wk = dow < 5 ? 1.0 : 0.45;
          const double rush = std::exp(-0.5 * std::pow((h - 8.0) / 1.6, 2)) +
                              std::exp(-0.5 * std::pow((h - 17.5) / 2.0, 2));
          f = 0.25 + 1.9 * wk * rush;
        } else if (sec == 2) {
          f = 0.6 + 0.8 * std::max(0.0, std::cos(2.0 * M_PI * (h - 19) / 24.0));
        } else {
          f = 0.8 + 0.4 * std::max(0.0, std::sin(M_PI * (h - 5) / 14.0));
        }
        out << ',' << num6(f);
      }
      out << '\n';
    }
  }
  {
    auto out = open_out(dir + "/emissions_month_factors.csv");
    out << "species,snap_sector";
    for (int m = 1; m <= 12; ++m) {
      char b[8];
      std::snprintf(b, sizeof b, ",m%02d", m);
      out << b;
    }
    out << '\n';
    for (int sp = 0; sp < kNumEmissionSpecies; ++sp) {
      for (int sec = 1; sec <= kNumSnapSectors; ++sec) {
        out << to_string(static_cast<EmissionSpecies>(sp)) << ',' << sec;
        for (int m = 1; m <= 12; ++m) {
          double f = 1.0;
          if (sec == 2) f = 1.0 + 0.5 * std::cos(2.0 * M_PI * (m - 1) / 12.0);   // heating
          else if (sec == 10) f = 1.0 + 0.4 * std::cos(2.0 * M_PI * (m - 4) / 12.0);
          else f = 1.0 + 0.1 * std::cos(2.0 * M_PI * (m - 1) / 12.0);
          out << ',' << num6(f);
        }
        out << '\n';
      }
    }
  }

  // --- land use ---
  {
    auto out = open_out(dir + "/land_use.csv");
    out << "cell_id";
    for (int i = 0; i < kNumLandUseClasses; ++i) {
      char b[16];
      std::snprintf(b, sizeof b, ",class_%02d", i);
      out << b;
    }
    out << '\n';
    for (const GridCell& c : area.cells()) {
      const double uf = layout.urban_frac(c.row, c.col);
      std::array<int32_t, kNumLandUseClasses> counts{};
      counts[0] = static_cast<int32_t>(std::floor(1600 * 0.50 * uf));
      counts[1] = static_cast<int32_t>(std::floor(1600 * 0.25 * uf));
      counts[12] = static_cast<int32_t>(std::floor(1600 * 0.15 * (1.0 - uf)));
      counts[5] = static_cast<int32_t>(std::floor(1600 * 0.40 * (1.0 - uf)));
      counts[20] = 16;  // a constant sliver of freshwater
      int32_t used = 0;
      for (int32_t v : counts) used += v;
      counts[7] = kLandUsePixelsPerCell - used;  // arable absorbs the remainder
      out << c.cell_id;
      for (int i = 0; i < kNumLandUseClasses; ++i) out << ',' << counts[static_cast<size_t>(i)];
      out << '\n';
    }
  }

  // --- stations ---
  const std::vector<StationPlan> plans = plan_stations(layout);
  {
    auto out = open_out(dir + "/stations.csv");
    out << "station_id,name,environment_class,x,y\n";
    for (const StationPlan& p : plans)
      out << p.id << ',' << csv::quote(p.name) << ',' << to_string(p.env) << ',' << num(p.x)
          << ',' << num(p.y) << '\n';
  }

  // --- measurements: ground truth + keyed noise through the feature store ---
  {
    FeatureStore::Inputs inputs;
    for (int year : spec.years) inputs.roads_by_year.emplace(year, roads);
    inputs.traffic_means = load_traffic_means(dir + "/traffic_means.csv");
    inputs.travel_profiles = load_travel_profiles(dir + "/travel_profiles.csv");
    inputs.regions = load_region_membership(dir + "/regions.csv");
    inputs.met = load_met_samples(dir + "/met_samples.csv");
    inputs.remote_sensing =
        MonthlyComposite::build(area, load_remote_sensing(dir + "/remote_sensing.csv"));
    inputs.emissions =
        load_emissions(dir + "/emissions_annual.csv", dir + "/emissions_hour_factors.csv",
                       dir + "/emissions_month_factors.csv", area.cell_count());
    inputs.land_use = load_land_use(dir + "/land_use.csv", area.cell_count());
    const FeatureStore store(area, std::move(inputs));

    auto out = open_out(dir + "/measurements.csv");
    out << "station_id,pollutant,timestamp_iso8601,value\n";
    std::vector<double> row(kNumFeatureColumns);
    for (size_t si = 0; si < plans.size(); ++si) {
      const StationPlan& p = plans[si];
      const CellId cell = area.snap_to_centroid({p.x, p.y}).first;
      int last_year = 0;
      for (UtcHour t : all_hours) {
        const int year = year_of(t);
        const bool forced = year != last_year;  // first hour of each year
        last_year = year;
        Rng cover = keyed_rng(spec.seed, 505, si, static_cast<uint64_t>(t.value));
        if (!forced && cover.uniform01() >= spec.measurement_coverage) continue;

        store.materialize_row(cell, t, row);
        const double g = spec.g.evaluate(row);
        double value;
        if (p.adversarial) {
          value = spec.adversarial_base - spec.adversarial_scale * (g - spec.g.base);
        } else {
          value = g;
        }
        Rng noise = keyed_rng(spec.seed, 606, si, static_cast<uint64_t>(t.value));
        value = std::max(0.0, value + noise.normal(0.0, spec.noise_sigma));
        Rng glitch = keyed_rng(spec.seed, 707, si, static_cast<uint64_t>(t.value));
        if (glitch.uniform01() < spec.negative_glitch_rate)
          value = -(0.5 + 3.0 * glitch.uniform01());  // instrument fault
        out << p.id << ',' << to_string(spec.pollutant) << ',' << format_iso_hour(t) << ','
            << num(value) << '\n';
      }
    }
  }

  // --- manifest ---
  {
    auto out = open_out(dir + "/world_manifest.txt");
    out << "airgrid synthetic world\n";
    out << "seed = " << spec.seed << "\n";
    out << "grid = " << spec.rows << " x " << spec.cols << " cells of "
        << num6(spec.cell_size) << " m\n";
    out << "years =";
    for (int y : spec.years) out << ' ' << y;
    out << "\npollutant = " << to_string(spec.pollutant) << "\n";
    out << "stations = " << plans.size() << "\n";
    for (const StationPlan& p : plans)
      if (p.adversarial) out << "adversarial_station = " << p.id << "\n";
    out << "coverage = " << num6(spec.measurement_coverage) << "\n";
    out << "noise_sigma = " << num6(spec.noise_sigma) << "\n";
    out << "negative_glitch_rate = " << num6(spec.negative_glitch_rate) << "\n";
    out << "\ngenerating function (full-schema feature row x):\n";
    out << "  s        = x[traffic_car_taxi]\n";
    out << "  wind     = hypot(x[met_wind_u_10m], x[met_wind_v_10m])\n";
    out << "  urban    = (x[land_class_00] + x[land_class_01]) / 1600\n";
    out << "  g(x)     = " << num6(spec.g.base) << "\n";
    out << "           + " << num6(spec.g.w_traffic) << " * s / (s + "
        << num6(spec.g.traffic_scale) << ")\n";
    out << "           + " << num6(spec.g.w_emissions) << " * log1p(x[emis_nox_s07])\n";
    out << "           + " << num6(spec.g.w_calm) << " * max(0, " << num6(spec.g.calm_threshold)
        << " - wind)\n";
    out << "           + " << num6(spec.g.w_remote) << " * x[rs_no2] / "
        << num6(spec.g.remote_scale) << "\n";
    out << "           + " << num6(spec.g.w_urban) << " * urban\n";
    out << "  adversarial stations: g'(x) = " << num6(spec.adversarial_base) << " - "
        << num6(spec.adversarial_scale) << " * (g(x) - " << num6(spec.g.base) << ")\n";
    out << "  measurement = max(0, g + N(0, sigma)), noise keyed by (seed, station, hour);\n";
    out << "  a keyed glitch stream injects negative instrument faults at the stated rate.\n";
    out << "\nfiles:\n";
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().filename() == "world_manifest.txt") continue;
      names.push_back(entry.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    for (const std::string& name : names) {
      char hash[24];
      std::snprintf(hash, sizeof hash, "%016" PRIx64, fnv1a_file(dir + "/" + name));
      out << "  " << hash << "  " << name << '\n';
    }
  }
}

WorldData WorldData::load(const std::string& dir) {
  StudyArea area = StudyArea::load(dir + "/area.csv");

  FeatureStore::Inputs inputs;
  bool any_roads = false;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name == "roads.csv") {
      inputs.roads_by_year.emplace(0, load_roads(entry.path().string()));
      any_roads = true;
    } else if (name.rfind("roads_", 0) == 0 && name.size() == 14 &&
               name.compare(10, 4, ".csv") == 0) {
      const int year = std::stoi(name.substr(6, 4));
      inputs.roads_by_year.emplace(year, load_roads(entry.path().string()));
      any_roads = true;
    }
  }
  if (!any_roads)
    throw ValidationError("world '" + dir + "' has no roads.csv or roads_<year>.csv");

  inputs.traffic_means = load_traffic_means(dir + "/traffic_means.csv");
  inputs.travel_profiles = load_travel_profiles(dir + "/travel_profiles.csv");
  inputs.regions = load_region_membership(dir + "/regions.csv");
  inputs.met = load_met_samples(dir + "/met_samples.csv");
  inputs.remote_sensing =
      MonthlyComposite::build(area, load_remote_sensing(dir + "/remote_sensing.csv"));
  inputs.emissions =
      load_emissions(dir + "/emissions_annual.csv", dir + "/emissions_hour_factors.csv",
                     dir + "/emissions_month_factors.csv", area.cell_count());
  inputs.land_use = load_land_use(dir + "/land_use.csv", area.cell_count());

  std::vector<StationSite> stations = load_stations(dir + "/stations.csv", area);
  std::vector<Measurement> measurements = load_measurements(dir + "/measurements.csv");
  FeatureStore store(area, std::move(inputs));  // keeps its own StudyArea copy
  return WorldData{std::move(area), std::move(stations), std::move(measurements),
                   std::move(store)};
}

}  // namespace airgrid
