#include "airgrid/feature_matrix.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "airgrid/errors.hpp"

namespace airgrid {

namespace {

constexpr std::array<const char*, kNumFeatureFamilies> kFamilyNames = {
    "TransportStructural", "TransportUse", "Meteorology", "RemoteSensing",
    "Emissions",           "LandUse",      "Temporal"};

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

const char* to_string(FeatureFamily f) { return kFamilyNames[static_cast<int>(f)]; }

FeatureFamily feature_family_from_string(const std::string& s) {
  for (int i = 0; i < kNumFeatureFamilies; ++i)
    if (s == kFamilyNames[i]) return static_cast<FeatureFamily>(i);
  throw ValidationError("unknown feature family '" + s + "'");
}

const FeatureSchema& FeatureSchema::full() {
  static const FeatureSchema schema = [] {
    FeatureSchema s;
    auto add = [&s](std::string name, FeatureFamily fam) {
      s.source_indices_.push_back(s.columns_.size());
      s.columns_.push_back({std::move(name), fam});
    };
    for (int t = 0; t < kNumHighwayTypes; ++t)
      add(std::string("dist_") + to_string(static_cast<HighwayType>(t)),
          FeatureFamily::kTransportStructural);
    for (int t = 0; t < kNumHighwayTypes; ++t)
      add(std::string("len_") + to_string(static_cast<HighwayType>(t)),
          FeatureFamily::kTransportStructural);
    for (int m = 0; m < kNumTransportModes; ++m)
      add(std::string("traffic_") + to_string(static_cast<TransportMode>(m)),
          FeatureFamily::kTransportUse);
    for (int v = 0; v < kNumMetVariables; ++v)
      add(std::string("met_") + kMetVariableNames[v], FeatureFamily::kMeteorology);
    for (int v = 0; v < kNumRemoteSensingVariables; ++v)
      add(std::string("rs_") + kRemoteSensingVariableNames[v], FeatureFamily::kRemoteSensing);
    for (int sp = 0; sp < kNumEmissionSpecies; ++sp) {
      for (int sec = 1; sec <= kNumSnapSectors; ++sec) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "_s%02d", sec);
        add("emis_" + lower(to_string(static_cast<EmissionSpecies>(sp))) + buf,
            FeatureFamily::kEmissions);
      }
    }
    for (int c = 0; c < kNumLandUseClasses; ++c) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "land_class_%02d", c);
      add(buf, FeatureFamily::kLandUse);
    }
    add("t_hour", FeatureFamily::kTemporal);
    add("t_day_of_week", FeatureFamily::kTemporal);
    add("t_iso_week", FeatureFamily::kTemporal);
    add("t_month", FeatureFamily::kTemporal);
    return s;
  }();
  return schema;
}

FeatureSchema FeatureSchema::subset(const std::vector<FeatureFamily>& families) const {
  if (families.empty()) throw ValidationError("feature family selection is empty");
  FeatureSchema out;
  for (size_t i = 0; i < columns_.size(); ++i) {
    if (std::find(families.begin(), families.end(), columns_[i].family) != families.end()) {
      out.columns_.push_back(columns_[i]);
      out.source_indices_.push_back(source_indices_[i]);
    }
  }
  return out;
}

uint64_t FeatureSchema::hash() const {
  uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (const FeatureColumn& c : columns_) {
    for (char ch : c.name) {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ULL;
    }
    h ^= '\n';
    h *= 1099511628211ULL;
  }
  return h;
}

size_t FeatureSchema::index_of(const std::string& name) const {
  for (size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i].name == name) return i;
  throw ValidationError("no feature column named '" + name + "'");
}

FeatureMatrix FeatureMatrix::restrict_to(const std::vector<FeatureFamily>& families) const {
  FeatureMatrix out;
  out.schema = schema.subset(families);
  out.keys = keys;
  const size_t w_in = schema.size();
  const size_t w_out = out.schema.size();
  std::vector<size_t> pick;
  pick.reserve(w_out);
  for (size_t i = 0; i < schema.size(); ++i) {
    const auto& fam = schema.column(i).family;
    if (std::find(families.begin(), families.end(), fam) != families.end())
      pick.push_back(i);
  }
  out.values.resize(keys.size() * w_out);
  for (size_t r = 0; r < keys.size(); ++r)
    for (size_t c = 0; c < w_out; ++c)
      out.values[r * w_out + c] = values[r * w_in + pick[c]];
  return out;
}

// ---------------------------------------------------------------------------

FeatureStore::FeatureStore(const StudyArea& area, Inputs inputs)
    : area_(area), in_(std::move(inputs)) {
  if (in_.roads_by_year.empty())
    throw ValidationError("feature store needs at least one road snapshot");
  for (const auto& [year, segments] : in_.roads_by_year) {
    auto features = road_structural_features(area_, segments);
    std::vector<std::array<double, kNumTransportModes>> daily(area_.cell_count());
    for (const GridCell& cell : area_.cells()) {
      const RoadCellFeatures& rf = features[static_cast<size_t>(cell.cell_id)];
      const bool any_motor_road = [&] {
        for (int t = 0; t < kNumHighwayTypes; ++t)
          if (is_motor_highway(static_cast<HighwayType>(t)) && rf.length_m[t] > 0.0)
            return true;
        return false;
      }();
      if (!any_motor_road) {
        daily[static_cast<size_t>(cell.cell_id)].fill(0.0);  // no roads, no traffic
        continue;
      }
      const auto region_it = in_.regions.find(cell.cell_id);
      if (region_it == in_.regions.end())
        throw DataGapError("cell " + std::to_string(cell.cell_id) +
                           " has roads but no region membership");
      daily[static_cast<size_t>(cell.cell_id)] =
          traffic_grid_score(rf, in_.traffic_means, region_it->second);
    }
    road_features_by_year_.emplace(year, std::move(features));
    daily_traffic_by_year_.emplace(year, std::move(daily));
  }
}

const RoadCellFeatures& FeatureStore::road_features(CellId cell, int year) const {
  auto it = road_features_by_year_.find(year);
  if (it == road_features_by_year_.end()) {
    it = road_features_by_year_.find(0);  // static fallback snapshot
    if (it == road_features_by_year_.end())
      throw DataGapError("no road snapshot for year " + std::to_string(year));
  }
  return it->second[static_cast<size_t>(cell)];
}

const std::array<double, kNumTransportModes>& FeatureStore::daily_traffic(CellId cell,
                                                                          int year) const {
  auto it = daily_traffic_by_year_.find(year);
  if (it == daily_traffic_by_year_.end()) {
    it = daily_traffic_by_year_.find(0);
    if (it == daily_traffic_by_year_.end())
      throw DataGapError("no road snapshot for year " + std::to_string(year));
  }
  return it->second[static_cast<size_t>(cell)];
}

void FeatureStore::materialize_row(CellId cell, UtcHour t, std::span<double> out) const {
  if (out.size() != kNumFeatureColumns)
    throw ValidationError("materialize_row: output span must have 152 elements");
  const GridCell& gc = area_.cell(cell);
  const TemporalFeatures tf = temporal_features(t);
  const int year = year_of(t);
  size_t k = 0;

  const RoadCellFeatures& rf = road_features(cell, year);
  for (int i = 0; i < kNumHighwayTypes; ++i) out[k++] = rf.distance_m[i];
  for (int i = 0; i < kNumHighwayTypes; ++i) out[k++] = rf.length_m[i];

  const auto& daily = daily_traffic(cell, year);
  const bool has_traffic =
      std::any_of(daily.begin(), daily.end(), [](double v) { return v != 0.0; });
  if (!has_traffic) {
    for (int m = 0; m < kNumTransportModes; ++m) out[k++] = 0.0;
  } else {
    const auto region_it = in_.regions.find(cell);
    if (region_it == in_.regions.end())
      throw DataGapError("cell " + std::to_string(cell) + " has no region membership");
    const DayKind dk = day_kind_of(t);
    for (int m = 0; m < kNumTransportModes; ++m) {
      const auto& profile =
          in_.travel_profiles.profile(region_it->second, dk, static_cast<TransportMode>(m));
      out[k++] = temporal_distribute(daily[m], profile, tf.hour);
    }
  }

  const Point centroid{gc.centroid_x, gc.centroid_y};
  for (int v = 0; v < kNumMetVariables; ++v) {
    const std::vector<PointSample>* samples = in_.met.at(v, t);
    if (samples == nullptr)
      throw DataGapError(std::string("no '") + kMetVariableNames[v] + "' samples at " +
                         format_iso_hour(t));
    out[k++] = idw_interpolate(*samples, std::span<const Point>(&centroid, 1))[0];
  }

  for (int v = 0; v < kNumRemoteSensingVariables; ++v)
    out[k++] = in_.remote_sensing.value_at(v, cell, t);

  for (int sp = 0; sp < kNumEmissionSpecies; ++sp)
    for (int sec = 1; sec <= kNumSnapSectors; ++sec)
      out[k++] = in_.emissions.scaled(static_cast<EmissionSpecies>(sp), sec, cell, t);

  const auto& land = in_.land_use.counts(cell);
  for (int c = 0; c < kNumLandUseClasses; ++c) out[k++] = land[c];

  out[k++] = tf.hour;
  out[k++] = tf.day_of_week;
  out[k++] = tf.iso_week;
  out[k++] = tf.month;
}

FeatureMatrix FeatureStore::assemble_pairs(
    const std::vector<std::pair<CellId, UtcHour>>& keys) const {
  FeatureMatrix m;
  m.schema = FeatureSchema::full();
  m.keys = keys;
  m.values.resize(keys.size() * kNumFeatureColumns);
  std::vector<std::string> gaps;
  size_t gap_count = 0;
  for (size_t i = 0; i < keys.size(); ++i) {
    try {
      materialize_row(keys[i].first, keys[i].second,
                      std::span<double>(m.values.data() + i * kNumFeatureColumns,
                                        kNumFeatureColumns));
    } catch (const DataGapError& e) {
      ++gap_count;
      if (gaps.size() < 16) gaps.push_back(e.what());
    }
  }
  if (gap_count > 0) {
    std::string msg = "feature assembly hit " + std::to_string(gap_count) + " gap(s):";
    for (const std::string& g : gaps) msg += "\n  " + g;
    if (gap_count > gaps.size()) msg += "\n  ...";
    throw DataGapError(msg);
  }
  return m;
}

FeatureMatrix FeatureStore::assemble(const std::vector<CellId>& cells,
                                     const std::vector<UtcHour>& timestamps) const {
  std::vector<std::pair<CellId, UtcHour>> keys;
  keys.reserve(cells.size() * timestamps.size());
  for (CellId c : cells)
    for (UtcHour t : timestamps) keys.emplace_back(c, t);
  return assemble_pairs(keys);
}

}  // namespace airgrid
