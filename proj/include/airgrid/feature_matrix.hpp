#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "airgrid/ingest.hpp"

namespace airgrid {

enum class FeatureFamily {
  kTransportStructural,  // 28
  kTransportUse,         // 5
  kMeteorology,          // 11
  kRemoteSensing,        // 5
  kEmissions,            // 77
  kLandUse,              // 22
  kTemporal,             // 4
};
constexpr int kNumFeatureFamilies = 7;
constexpr size_t kNumFeatureColumns = 152;
const char* to_string(FeatureFamily f);
FeatureFamily feature_family_from_string(const std::string& s);

struct FeatureColumn {
  std::string name;
  FeatureFamily family;
};

// Canonical column layout. A subset keeps the surviving columns in full-schema
// order and remembers their source indices.
class FeatureSchema {
 public:
  static const FeatureSchema& full();
  FeatureSchema subset(const std::vector<FeatureFamily>& families) const;

  size_t size() const { return columns_.size(); }
  const std::vector<FeatureColumn>& columns() const { return columns_; }
  const FeatureColumn& column(size_t i) const { return columns_[i]; }
  const std::vector<size_t>& source_indices() const { return source_indices_; }
  uint64_t hash() const;
  size_t index_of(const std::string& name) const;  // throws if absent

 private:
  std::vector<FeatureColumn> columns_;
  std::vector<size_t> source_indices_;  // into the full schema
};

struct FeatureMatrix {
  FeatureSchema schema;
  std::vector<std::pair<CellId, UtcHour>> keys;
  std::vector<double> values;  // row-major, keys.size() x schema.size()

  size_t n_rows() const { return keys.size(); }
  std::span<const double> row(size_t i) const {
    return {values.data() + i * schema.size(), schema.size()};
  }
  FeatureMatrix restrict_to(const std::vector<FeatureFamily>& families) const;
};

// Immutable per-family caches with row materialization for any
// (cell, timestamp). Shareable across threads once constructed.
class FeatureStore {
 public:
  struct Inputs {
    // Yearly road snapshots; a single entry keyed 0 serves every year.
    std::map<int, std::vector<RoadSegment>> roads_by_year;
    TrafficMeans traffic_means;
    TravelProfiles travel_profiles;
    std::map<CellId, std::string> regions;
    MetSamples met;
    MonthlyComposite remote_sensing;
    EmissionsMap emissions;
    LandUseProfiles land_use;
  };

  FeatureStore(const StudyArea& area, Inputs inputs);

  const StudyArea& area() const { return area_; }

  // Fills out (size 152, full-schema order); throws DataGapError on any
  // missing family value.
  void materialize_row(CellId cell, UtcHour t, std::span<double> out) const;

  // Cross product in request order: for each cell, every timestamp.
  FeatureMatrix assemble(const std::vector<CellId>& cells,
                         const std::vector<UtcHour>& timestamps) const;
  FeatureMatrix assemble_pairs(const std::vector<std::pair<CellId, UtcHour>>& keys) const;

  const RoadCellFeatures& road_features(CellId cell, int year) const;

 private:
  const std::array<double, kNumTransportModes>& daily_traffic(CellId cell, int year) const;

  StudyArea area_;
  Inputs in_;
  std::map<int, std::vector<RoadCellFeatures>> road_features_by_year_;
  std::map<int, std::vector<std::array<double, kNumTransportModes>>> daily_traffic_by_year_;
};

}  // namespace airgrid
