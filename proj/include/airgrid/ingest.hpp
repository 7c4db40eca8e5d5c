#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "airgrid/geometry.hpp"
#include "airgrid/grid.hpp"
#include "airgrid/timeutil.hpp"

namespace airgrid {

// ---------------------------------------------------------------------------
// Domain enumerations. Orderings here are canonical: they fix feature-column
// order and all file schemas.
// ---------------------------------------------------------------------------

enum class Pollutant { kNO, kNO2, kNOx, kO3, kPM10, kPM25, kSO2 };
constexpr int kNumPollutants = 7;
const char* to_string(Pollutant p);
Pollutant pollutant_from_string(const std::string& s);

enum class HighwayType {
  kResidential, kFootway, kService, kPrimary, kPath, kCycleway, kTertiary,
  kSecondary, kUnclassified, kTrunk, kTrack, kMotorway, kPedestrian, kLivingStreet,
};
constexpr int kNumHighwayTypes = 14;
const char* to_string(HighwayType t);
HighwayType highway_type_from_string(const std::string& s);
// The ten types carrying motor-vehicle traffic means.
bool is_motor_highway(HighwayType t);

enum class TransportMode { kBicycle, kCarTaxi, kBusCoach, kLGV, kHGV };
constexpr int kNumTransportModes = 5;
const char* to_string(TransportMode m);
TransportMode transport_mode_from_string(const std::string& s);

enum class DayKind { kWeekday, kSaturday, kSunday };
const char* to_string(DayKind d);
DayKind day_kind_from_string(const std::string& s);
DayKind day_kind_of(UtcHour t);

enum class EmissionSpecies { kPM25, kPM10, kNMVOC, kNH3, kSOx, kCO, kNOx };
constexpr int kNumEmissionSpecies = 7;
constexpr int kNumSnapSectors = 11;  // SNAP sectors 1..11
const char* to_string(EmissionSpecies s);
EmissionSpecies emission_species_from_string(const std::string& s);

constexpr int kNumMetVariables = 11;
extern const std::array<const char*, kNumMetVariables> kMetVariableNames;
int met_variable_index(const std::string& name);

constexpr int kNumRemoteSensingVariables = 5;
extern const std::array<const char*, kNumRemoteSensingVariables> kRemoteSensingVariableNames;
int remote_sensing_variable_index(const std::string& name);

constexpr int kNumLandUseClasses = 22;
constexpr int kLandUsePixelsPerCell = 1600;  // 25 m raster pixels in a 1 km cell

// Distance reported for a road type with no segment anywhere in the network:
// a finite "very far" value that stays binnable by the histogram learner.
constexpr double kAbsentRoadDistance = 1.0e6;

// ---------------------------------------------------------------------------
// Target vector
// ---------------------------------------------------------------------------

struct Measurement {
  std::string station_id;
  Pollutant pollutant;
  UtcHour timestamp;
  double value;  // ug/m3
};

struct CleanResult {
  std::vector<Measurement> kept;  // input order, values untouched
  std::array<int64_t, kNumPollutants> removed_per_pollutant{};
  int64_t removed_total() const;
};

// Drops negative values (instrument faults); never clamps.
CleanResult clean_measurements(const std::vector<Measurement>& raw);

// ---------------------------------------------------------------------------
// Transport infrastructure
// ---------------------------------------------------------------------------

struct RoadSegment {
  int64_t segment_id;
  HighwayType highway_type;
  std::vector<Point> polyline;  // >= 2 points, planar meters
};

// 14 centroid-to-nearest-segment distances followed by 14 clipped in-cell
// lengths, both indexed by HighwayType.
struct RoadCellFeatures {
  std::array<double, kNumHighwayTypes> distance_m;
  std::array<double, kNumHighwayTypes> length_m;
};

std::vector<RoadCellFeatures> road_structural_features(
    const StudyArea& area, const std::vector<RoadSegment>& segments);

// region -> [highway][mode] -> mean daily flow per meter of road.
class TrafficMeans {
 public:
  void set(const std::string& region, HighwayType t, TransportMode m, double mean_flow);
  bool has_region(const std::string& region) const;
  double mean_flow(const std::string& region, HighwayType t, TransportMode m) const;

 private:
  std::map<std::string, std::array<double, kNumHighwayTypes * kNumTransportModes>> table_;
};

// score[mode] = sum over motor road types of length_m * mean flow per meter.
std::array<double, kNumTransportModes> traffic_grid_score(
    const RoadCellFeatures& cell, const TrafficMeans& means, const std::string& region);

// (region, day kind, mode) -> 24-vector summing to 1.
class TravelProfiles {
 public:
  // Normalizes to unit sum; an all-zero profile is rejected at load.
  void set(const std::string& region, DayKind d, TransportMode m,
           const std::array<double, 24>& weights);
  const std::array<double, 24>& profile(const std::string& region, DayKind d,
                                        TransportMode m) const;
  bool has_region(const std::string& region) const;

 private:
  std::map<std::string, std::array<std::array<double, 24>, 3 * kNumTransportModes>> table_;
  std::map<std::string, std::array<bool, 3 * kNumTransportModes>> present_;
};

double temporal_distribute(double daily_score, const std::array<double, 24>& profile, int hour);

// ---------------------------------------------------------------------------
// Meteorology
// ---------------------------------------------------------------------------

struct PointSample {
  double x;
  double y;
  double value;
};

// Inverse-distance-weighted mean of the k nearest samples; exact passthrough
// when a target coincides with a sample (distance < 1e-9 m).
std::vector<double> idw_interpolate(const std::vector<PointSample>& samples,
                                    std::span<const Point> targets, double power = 2.0,
                                    int k_neighbors = 8);

// All met samples for one variable, grouped by timestamp.
class MetSamples {
 public:
  void add(int variable, UtcHour t, PointSample s);
  const std::vector<PointSample>* at(int variable, UtcHour t) const;  // null if absent

 private:
  std::map<std::pair<int, int64_t>, std::vector<PointSample>> by_key_;
};

// ---------------------------------------------------------------------------
// Remote sensing monthly composites
// ---------------------------------------------------------------------------

struct RemoteSensingSample {
  int variable;
  CellId cell;
  int month;  // 1..12
  double value;
};

// Per-variable, per-cell, per-month mean with iterative 8-neighborhood gap
// fill. Lookup by timestamp returns the value for that timestamp's month,
// whatever the year (backfill).
class MonthlyComposite {
 public:
  static MonthlyComposite build(const StudyArea& area,
                                const std::vector<RemoteSensingSample>& samples);

  double value_at(int variable, CellId cell, UtcHour t) const;
  double value_at_month(int variable, CellId cell, int month) const;

  // Re-runs the gap fill; on a complete composite this is the identity.
  void fill_gaps(const StudyArea& area);

 private:
  size_t n_cells_ = 0;
  // [variable][cell * 12 + month-1]; NaN marks a gap during construction.
  std::array<std::vector<double>, kNumRemoteSensingVariables> values_;
};

// ---------------------------------------------------------------------------
// Emissions
// ---------------------------------------------------------------------------

class EmissionsMap {
 public:
  EmissionsMap() : EmissionsMap(0) {}
  explicit EmissionsMap(size_t n_cells);

  void add_annual(EmissionSpecies s, int snap_sector, CellId cell, double annual_value);
  // Tables are renormalized to mean 1 at load so annual mass is conserved.
  void set_hour_factors(int snap_sector, const std::array<double, 168>& factors);
  void set_month_factors(EmissionSpecies s, int snap_sector,
                         const std::array<double, 12>& factors);

  double annual(EmissionSpecies s, int snap_sector, CellId cell) const;
  double hour_factor(int snap_sector, int week_hour) const;
  double month_factor(EmissionSpecies s, int snap_sector, int month) const;

  // annual * hour_factor[sector][dow*24+hour] * month_factor[species][sector][month].
  double scaled(EmissionSpecies s, int snap_sector, CellId cell, UtcHour t) const;

 private:
  size_t n_cells_;
  std::array<std::vector<double>, kNumEmissionSpecies * kNumSnapSectors> annual_;
  std::array<std::optional<std::array<double, 168>>, kNumSnapSectors> hour_factors_;
  std::array<std::optional<std::array<double, 12>>,
             kNumEmissionSpecies * kNumSnapSectors> month_factors_;
};

// ---------------------------------------------------------------------------
// Land use
// ---------------------------------------------------------------------------

class LandUseProfiles {
 public:
  LandUseProfiles() = default;
  explicit LandUseProfiles(size_t n_cells) : counts_(n_cells), present_(n_cells, false) {}

  // Counts must sum to the raster's pixels-per-cell constant.
  void set(CellId cell, const std::array<int32_t, kNumLandUseClasses>& counts);
  bool has(CellId cell) const;
  const std::array<int32_t, kNumLandUseClasses>& counts(CellId cell) const;

 private:
  std::vector<std::array<int32_t, kNumLandUseClasses>> counts_;
  std::vector<bool> present_;
};

// ---------------------------------------------------------------------------
// CSV loaders (schemas documented in the README)
// ---------------------------------------------------------------------------

std::vector<Measurement> load_measurements(const std::string& path);
std::vector<StationSite> load_stations(const std::string& path, const StudyArea& area);
std::vector<RoadSegment> load_roads(const std::string& path);
TrafficMeans load_traffic_means(const std::string& path);
TravelProfiles load_travel_profiles(const std::string& path);
MetSamples load_met_samples(const std::string& path);
std::vector<RemoteSensingSample> load_remote_sensing(const std::string& path);
EmissionsMap load_emissions(const std::string& annual_path, const std::string& hour_path,
                            const std::string& month_path, size_t n_cells);
LandUseProfiles load_land_use(const std::string& path, size_t n_cells);
std::map<CellId, std::string> load_region_membership(const std::string& path);

std::vector<Point> parse_wkt_linestring(const std::string& wkt);
std::string format_wkt_linestring(const std::vector<Point>& polyline);

}  // namespace airgrid
