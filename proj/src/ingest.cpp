#include "airgrid/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "airgrid/errors.hpp"

namespace airgrid {

namespace {

template <typename Enum, size_t N>
Enum enum_from_string(const std::string& s, const std::array<const char*, N>& names,
                      const char* what) {
  for (size_t i = 0; i < N; ++i)
    if (s == names[i]) return static_cast<Enum>(i);
  throw ValidationError(std::string("unknown ") + what + " '" + s + "'");
}

constexpr std::array<const char*, kNumPollutants> kPollutantNames = {
    "NO", "NO2", "NOx", "O3", "PM10", "PM25", "SO2"};

constexpr std::array<const char*, kNumHighwayTypes> kHighwayNames = {
    "residential", "footway",      "service", "primary",  "path",
    "cycleway",    "tertiary",     "secondary", "unclassified", "trunk",
    "track",       "motorway",     "pedestrian", "living_street"};

constexpr std::array<const char*, kNumTransportModes> kModeNames = {
    "bicycle", "car_taxi", "bus_coach", "lgv", "hgv"};

constexpr std::array<const char*, 3> kDayKindNames = {"weekday", "saturday", "sunday"};

constexpr std::array<const char*, kNumEmissionSpecies> kSpeciesNames = {
    "PM25", "PM10", "NMVOC", "NH3", "SOx", "CO", "NOx"};

}  // namespace

const std::array<const char*, kNumMetVariables> kMetVariableNames = {
    "wind_u_100m",        "wind_v_100m",    "wind_u_10m",
    "wind_v_10m",         "dewpoint_2m",    "temperature_2m",
    "boundary_layer_height", "downward_uv_radiation", "wind_gust_10m",
    "surface_pressure",   "total_column_rainwater"};

const std::array<const char*, kNumRemoteSensingVariables> kRemoteSensingVariableNames = {
    "no2", "co", "hcho", "o3", "aerosol_index"};

const char* to_string(Pollutant p) { return kPollutantNames[static_cast<int>(p)]; }
Pollutant pollutant_from_string(const std::string& s) {
  return enum_from_string<Pollutant>(s, kPollutantNames, "pollutant");
}

const char* to_string(HighwayType t) { return kHighwayNames[static_cast<int>(t)]; }
HighwayType highway_type_from_string(const std::string& s) {
  return enum_from_string<HighwayType>(s, kHighwayNames, "highway type");
}

bool is_motor_highway(HighwayType t) {
  switch (t) {
    case HighwayType::kMotorway:
    case HighwayType::kTrunk:
    case HighwayType::kPrimary:
    case HighwayType::kSecondary:
    case HighwayType::kTertiary:
    case HighwayType::kUnclassified:
    case HighwayType::kResidential:
    case HighwayType::kLivingStreet:
    case HighwayType::kService:
    case HighwayType::kTrack:
      return true;
    default:
      return false;
  }
}

const char* to_string(TransportMode m) { return kModeNames[static_cast<int>(m)]; }
TransportMode transport_mode_from_string(const std::string& s) {
  return enum_from_string<TransportMode>(s, kModeNames, "transport mode");
}

const char* to_string(DayKind d) { return kDayKindNames[static_cast<int>(d)]; }
DayKind day_kind_from_string(const std::string& s) {
  return enum_from_string<DayKind>(s, kDayKindNames, "day kind");
}

DayKind day_kind_of(UtcHour t) {
  const int dow = temporal_features(t).day_of_week;
  if (dow == 5) return DayKind::kSaturday;
  if (dow == 6) return DayKind::kSunday;
  return DayKind::kWeekday;
}

const char* to_string(EmissionSpecies s) { return kSpeciesNames[static_cast<int>(s)]; }
EmissionSpecies emission_species_from_string(const std::string& s) {
  return enum_from_string<EmissionSpecies>(s, kSpeciesNames, "emission species");
}

int met_variable_index(const std::string& name) {
  for (int i = 0; i < kNumMetVariables; ++i)
    if (name == kMetVariableNames[i]) return i;
  throw ValidationError("unknown meteorological variable '" + name + "'");
}

int remote_sensing_variable_index(const std::string& name) {
  for (int i = 0; i < kNumRemoteSensingVariables; ++i)
    if (name == kRemoteSensingVariableNames[i]) return i;
  throw ValidationError("unknown remote sensing variable '" + name + "'");
}

// ---------------------------------------------------------------------------

int64_t CleanResult::removed_total() const {
  return std::accumulate(removed_per_pollutant.begin(), removed_per_pollutant.end(),
                         int64_t{0});
}

CleanResult clean_measurements(const std::vector<Measurement>& raw) {
  CleanResult r;
  r.kept.reserve(raw.size());
  for (const Measurement& m : raw) {
    if (m.value < 0.0) {
      ++r.removed_per_pollutant[static_cast<int>(m.pollutant)];
    } else {
      r.kept.push_back(m);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

std::vector<RoadCellFeatures> road_structural_features(
    const StudyArea& area, const std::vector<RoadSegment>& segments) {
  std::vector<RoadCellFeatures> out(area.cell_count());
  for (auto& f : out) {
    f.distance_m.fill(kAbsentRoadDistance);
    f.length_m.fill(0.0);
  }

  for (const RoadSegment& seg : segments) {
    if (seg.polyline.size() < 2)
      throw ValidationError("segment " + std::to_string(seg.segment_id) +
                            " has fewer than 2 points");
    const int type = static_cast<int>(seg.highway_type);
    for (const auto& [cell, len] : clip_polyline_to_cells(seg.polyline, area))
      out[static_cast<size_t>(cell)].length_m[type] += len;
  }

  // Nearest-segment distances, brute force over the network per cell.
  for (const GridCell& cell : area.cells()) {
    const Point centroid{cell.centroid_x, cell.centroid_y};
    auto& f = out[static_cast<size_t>(cell.cell_id)];
    for (const RoadSegment& seg : segments) {
      const int type = static_cast<int>(seg.highway_type);
      const double d = point_polyline_distance(centroid, seg.polyline);
      if (d < f.distance_m[type]) f.distance_m[type] = d;
    }
  }
  return out;
}

void TrafficMeans::set(const std::string& region, HighwayType t, TransportMode m,
                       double mean_flow) {
  if (mean_flow < 0.0) throw ValidationError("traffic mean flow must be >= 0");
  if (!is_motor_highway(t))
    throw ValidationError(std::string("highway type '") + to_string(t) +
                          "' does not carry traffic means");
  auto it = table_.find(region);
  if (it == table_.end()) {
    it = table_.emplace(region, std::array<double, kNumHighwayTypes * kNumTransportModes>{})
             .first;
  }
  it->second[static_cast<size_t>(t) * kNumTransportModes + static_cast<size_t>(m)] = mean_flow;
}

bool TrafficMeans::has_region(const std::string& region) const {
  return table_.count(region) > 0;
}

double TrafficMeans::mean_flow(const std::string& region, HighwayType t,
                               TransportMode m) const {
  const auto it = table_.find(region);
  if (it == table_.end()) throw ValidationError("unknown traffic region '" + region + "'");
  return it->second[static_cast<size_t>(t) * kNumTransportModes + static_cast<size_t>(m)];
}

std::array<double, kNumTransportModes> traffic_grid_score(
    const RoadCellFeatures& cell, const TrafficMeans& means, const std::string& region) {
  if (!means.has_region(region))
    throw ValidationError("unknown traffic region '" + region + "'");
  std::array<double, kNumTransportModes> score{};
  for (int t = 0; t < kNumHighwayTypes; ++t) {
    const auto type = static_cast<HighwayType>(t);
    if (!is_motor_highway(type)) continue;
    const double len = cell.length_m[t];
    if (len == 0.0) continue;
    for (int m = 0; m < kNumTransportModes; ++m)
      score[m] += len * means.mean_flow(region, type, static_cast<TransportMode>(m));
  }
  return score;
}

void TravelProfiles::set(const std::string& region, DayKind d, TransportMode m,
                         const std::array<double, 24>& weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw ValidationError("travel profile weights must be >= 0");
    sum += w;
  }
  if (sum <= 0.0)
    throw ValidationError("travel profile for region '" + region + "' is all zero");
  std::array<double, 24> norm;
  for (int h = 0; h < 24; ++h) norm[h] = weights[h] / sum;
  const size_t slot =
      static_cast<size_t>(d) * kNumTransportModes + static_cast<size_t>(m);
  table_[region][slot] = norm;
  present_[region][slot] = true;
}

const std::array<double, 24>& TravelProfiles::profile(const std::string& region, DayKind d,
                                                      TransportMode m) const {
  const auto it = table_.find(region);
  const size_t slot =
      static_cast<size_t>(d) * kNumTransportModes + static_cast<size_t>(m);
  if (it == table_.end() || !present_.at(region)[slot])
    throw ValidationError("no travel profile for region '" + region + "', " +
                          to_string(d) + ", " + to_string(m));
  return it->second[slot];
}

bool TravelProfiles::has_region(const std::string& region) const {
  return table_.count(region) > 0;
}

double temporal_distribute(double daily_score, const std::array<double, 24>& profile,
                           int hour) {
  if (hour < 0 || hour > 23) throw ValidationError("hour out of range");
  return daily_score * profile[hour];
}

// ---------------------------------------------------------------------------

std::vector<double> idw_interpolate(const std::vector<PointSample>& samples,
                                    std::span<const Point> targets, double power,
                                    int k_neighbors) {
  if (samples.empty()) throw ValidationError("idw_interpolate: no samples");
  if (power <= 0.0) throw ValidationError("idw_interpolate: power must be > 0");
  if (k_neighbors < 1) throw ValidationError("idw_interpolate: k_neighbors must be >= 1");

  const size_t k = std::min<size_t>(static_cast<size_t>(k_neighbors), samples.size());
  std::vector<double> out(targets.size());
  std::vector<std::pair<double, size_t>> dist(samples.size());

  for (size_t ti = 0; ti < targets.size(); ++ti) {
    const Point& p = targets[ti];
    for (size_t si = 0; si < samples.size(); ++si) {
      const double dx = p.x - samples[si].x;
      const double dy = p.y - samples[si].y;
      dist[si] = {std::sqrt(dx * dx + dy * dy), si};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<ptrdiff_t>(k), dist.end());
    if (dist[0].first < 1e-9 || k == 1) {
      out[ti] = samples[dist[0].second].value;  // exact at nodes and for k = 1
      continue;
    }
    double wsum = 0.0, vsum = 0.0;
    for (size_t i = 0; i < k; ++i) {
      const double w = 1.0 / std::pow(dist[i].first, power);
      wsum += w;
      vsum += w * samples[dist[i].second].value;
    }
    out[ti] = vsum / wsum;
  }
  return out;
}

void MetSamples::add(int variable, UtcHour t, PointSample s) {
  by_key_[{variable, t.value}].push_back(s);
}

const std::vector<PointSample>* MetSamples::at(int variable, UtcHour t) const {
  const auto it = by_key_.find({variable, t.value});
  return it == by_key_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------

MonthlyComposite MonthlyComposite::build(const StudyArea& area,
                                         const std::vector<RemoteSensingSample>& samples) {
  MonthlyComposite c;
  c.n_cells_ = area.cell_count();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (auto& v : c.values_) v.assign(c.n_cells_ * 12, nan);

  std::array<std::vector<std::pair<double, int>>, kNumRemoteSensingVariables> acc;
  for (auto& a : acc) a.assign(c.n_cells_ * 12, {0.0, 0});
  for (const RemoteSensingSample& s : samples) {
    if (s.month < 1 || s.month > 12)
      throw ValidationError("remote sensing month out of range");
    if (s.cell < 0 || static_cast<size_t>(s.cell) >= c.n_cells_)
      throw ValidationError("remote sensing sample references unknown cell");
    auto& slot = acc[s.variable][static_cast<size_t>(s.cell) * 12 + (s.month - 1)];
    slot.first += s.value;
    slot.second += 1;
  }
  for (int v = 0; v < kNumRemoteSensingVariables; ++v)
    for (size_t i = 0; i < acc[v].size(); ++i)
      if (acc[v][i].second > 0) c.values_[v][i] = acc[v][i].first / acc[v][i].second;

  // A month with no sample anywhere cannot be composited at all.
  for (int v = 0; v < kNumRemoteSensingVariables; ++v) {
    for (int m = 0; m < 12; ++m) {
      bool any = false;
      for (size_t cell = 0; cell < c.n_cells_ && !any; ++cell)
        any = !std::isnan(c.values_[v][cell * 12 + m]);
      if (!any)
        throw DataGapError(std::string("remote sensing variable '") +
                           kRemoteSensingVariableNames[v] + "' has no samples for month " +
                           std::to_string(m + 1));
    }
  }

  c.fill_gaps(area);
  return c;
}

void MonthlyComposite::fill_gaps(const StudyArea& area) {
  for (int v = 0; v < kNumRemoteSensingVariables; ++v) {
    auto& vals = values_[v];
    for (int m = 0; m < 12; ++m) {
      for (;;) {
        size_t missing = 0;
        // Fill strictly from the previous pass so the result does not depend
        // on cell visit order.
        std::vector<std::pair<size_t, double>> fills;
        for (const GridCell& cell : area.cells()) {
          const size_t idx = static_cast<size_t>(cell.cell_id) * 12 + m;
          if (!std::isnan(vals[idx])) continue;
          ++missing;
          double sum = 0.0;
          int n = 0;
          for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
              if (dr == 0 && dc == 0) continue;
              if (!area.contains(cell.row + dr, cell.col + dc)) continue;
              const CellId nb = area.cell_lookup(
                  area.origin_x() + (cell.col + dc + 0.5) * area.cell_size(),
                  area.origin_y() + (cell.row + dr + 0.5) * area.cell_size());
              const double nv = vals[static_cast<size_t>(nb) * 12 + m];
              if (!std::isnan(nv)) {
                sum += nv;
                ++n;
              }
            }
          }
          if (n > 0) fills.emplace_back(idx, sum / n);
        }
        if (missing == 0) break;
        if (fills.empty())
          throw DataGapError(std::string("remote sensing variable '") +
                             kRemoteSensingVariableNames[v] + "' month " +
                             std::to_string(m + 1) +
                             ": isolated cells cannot be gap-filled");
        for (const auto& [idx, value] : fills) vals[idx] = value;
      }
    }
  }
}

double MonthlyComposite::value_at_month(int variable, CellId cell, int month) const {
  if (month < 1 || month > 12) throw ValidationError("month out of range");
  if (cell < 0 || static_cast<size_t>(cell) >= n_cells_)
    throw ValidationError("unknown cell in remote sensing lookup");
  return values_[variable][static_cast<size_t>(cell) * 12 + (month - 1)];
}

double MonthlyComposite::value_at(int variable, CellId cell, UtcHour t) const {
  return value_at_month(variable, cell, temporal_features(t).month);
}

// ---------------------------------------------------------------------------

EmissionsMap::EmissionsMap(size_t n_cells) : n_cells_(n_cells) {}

void EmissionsMap::add_annual(EmissionSpecies s, int snap_sector, CellId cell,
                              double annual_value) {
  if (snap_sector < 1 || snap_sector > kNumSnapSectors)
    throw ValidationError("SNAP sector out of range: " + std::to_string(snap_sector));
  if (annual_value < 0.0) throw ValidationError("annual emission value must be >= 0");
  if (cell < 0 || static_cast<size_t>(cell) >= n_cells_)
    throw ValidationError("emissions reference unknown cell " + std::to_string(cell));
  auto& grid = annual_[static_cast<size_t>(s) * kNumSnapSectors + (snap_sector - 1)];
  if (grid.empty()) grid.assign(n_cells_, 0.0);
  grid[static_cast<size_t>(cell)] += annual_value;
}

namespace {

template <size_t N>
std::array<double, N> mean_normalize(const std::array<double, N>& in, const char* what) {
  double sum = 0.0;
  for (double v : in) {
    if (v < 0.0) throw ValidationError(std::string(what) + ": factors must be >= 0");
    sum += v;
  }
  if (sum <= 0.0) throw ValidationError(std::string(what) + ": factors are all zero");
  std::array<double, N> out;
  const double mean = sum / static_cast<double>(N);
  for (size_t i = 0; i < N; ++i) out[i] = in[i] / mean;
  return out;
}

}  // namespace

void EmissionsMap::set_hour_factors(int snap_sector, const std::array<double, 168>& factors) {
  if (snap_sector < 1 || snap_sector > kNumSnapSectors)
    throw ValidationError("SNAP sector out of range");
  hour_factors_[snap_sector - 1] = mean_normalize(factors, "hour factors");
}

void EmissionsMap::set_month_factors(EmissionSpecies s, int snap_sector,
                                     const std::array<double, 12>& factors) {
  if (snap_sector < 1 || snap_sector > kNumSnapSectors)
    throw ValidationError("SNAP sector out of range");
  month_factors_[static_cast<size_t>(s) * kNumSnapSectors + (snap_sector - 1)] =
      mean_normalize(factors, "month factors");
}

double EmissionsMap::annual(EmissionSpecies s, int snap_sector, CellId cell) const {
  const auto& grid = annual_[static_cast<size_t>(s) * kNumSnapSectors + (snap_sector - 1)];
  if (grid.empty()) return 0.0;
  return grid[static_cast<size_t>(cell)];
}

double EmissionsMap::hour_factor(int snap_sector, int week_hour) const {
  const auto& f = hour_factors_[snap_sector - 1];
  if (!f)
    throw DataGapError("missing hour scaling for SNAP sector " + std::to_string(snap_sector));
  return (*f)[static_cast<size_t>(week_hour)];
}

double EmissionsMap::month_factor(EmissionSpecies s, int snap_sector, int month) const {
  const auto& f =
      month_factors_[static_cast<size_t>(s) * kNumSnapSectors + (snap_sector - 1)];
  if (!f)
    throw DataGapError(std::string("missing month scaling for ") + to_string(s) +
                       " SNAP sector " + std::to_string(snap_sector));
  return (*f)[static_cast<size_t>(month - 1)];
}

double EmissionsMap::scaled(EmissionSpecies s, int snap_sector, CellId cell, UtcHour t) const {
  const double a = annual(s, snap_sector, cell);
  const TemporalFeatures tf = temporal_features(t);
  const int week_hour = tf.day_of_week * 24 + tf.hour;
  return a * hour_factor(snap_sector, week_hour) * month_factor(s, snap_sector, tf.month);
}

// ---------------------------------------------------------------------------

void LandUseProfiles::set(CellId cell, const std::array<int32_t, kNumLandUseClasses>& counts) {
  if (cell < 0 || static_cast<size_t>(cell) >= counts_.size())
    throw ValidationError("land use references unknown cell " + std::to_string(cell));
  int32_t sum = 0;
  for (int32_t c : counts) {
    if (c < 0) throw ValidationError("land use pixel counts must be >= 0");
    sum += c;
  }
  if (sum != kLandUsePixelsPerCell)
    throw ValidationError("land use counts for cell " + std::to_string(cell) + " sum to " +
                          std::to_string(sum) + ", expected " +
                          std::to_string(kLandUsePixelsPerCell));
  counts_[static_cast<size_t>(cell)] = counts;
  present_[static_cast<size_t>(cell)] = true;
}

bool LandUseProfiles::has(CellId cell) const {
  return cell >= 0 && static_cast<size_t>(cell) < present_.size() &&
         present_[static_cast<size_t>(cell)];
}

const std::array<int32_t, kNumLandUseClasses>& LandUseProfiles::counts(CellId cell) const {
  if (!has(cell))
    throw DataGapError("no land use profile for cell " + std::to_string(cell));
  return counts_[static_cast<size_t>(cell)];
}

}  // namespace airgrid
