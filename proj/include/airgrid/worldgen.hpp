#pragma once

#include <array>
#include <string>
#include <vector>

#include "airgrid/feature_matrix.hpp"
#include "airgrid/microsim.hpp"
#include "airgrid/rng.hpp"

namespace airgrid {

// Ground truth for synthetic measurements, written to the world manifest so
// oracles can recompute it from any assembled feature row.
struct GeneratingFunction {
  double base = 4.0;
  double w_traffic = 6.0;         // saturating car/taxi score term
  double traffic_scale = 2000.0;
  double w_emissions = 0.9;       // log1p of road-sector NOx emissions
  double w_calm = 0.5;            // low-wind accumulation
  double calm_threshold = 6.0;    // m/s
  double w_remote = 1.2;          // monthly remote-sensing baseline
  double remote_scale = 40.0;
  double w_urban = 3.0;           // urban land fraction

  // Noiseless concentration from a full-schema feature row.
  double evaluate(std::span<const double> features) const;
};

struct SyntheticWorldSpec {
  int32_t rows = 20;
  int32_t cols = 20;
  double cell_size = 1000.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  std::vector<int> years = {2016, 2017, 2018};
  // UrbanBackground, UrbanTraffic, UrbanIndustrial, SuburbanBackground,
  // SuburbanIndustrial, RuralBackground.
  std::array<int, 6> stations_per_class = {4, 3, 1, 1, 1, 2};
  int adversarial_stations = 1;  // rural stations with an inverted response
  double adversarial_base = 9.0;
  double adversarial_scale = 0.5;
  double measurement_coverage = 0.65;  // fraction of hours a station reports
  double noise_sigma = 0.8;            // ug/m3
  double negative_glitch_rate = 0.002;
  Pollutant pollutant = Pollutant::kNO2;
  int met_sites = 4;
  GeneratingFunction g;
  uint64_t seed = 0;

  int total_stations() const;
};

// Writes every ingest-schema file plus survey/marginals inputs and a manifest
// (generating function, parameters, file hashes). Byte-identical for a fixed
// spec.
void generate_world(const SyntheticWorldSpec& spec, const std::string& dir);

// Everything needed to run experiments against a world directory.
struct WorldData {
  StudyArea area;
  std::vector<StationSite> stations;
  std::vector<Measurement> raw_measurements;
  FeatureStore store;

  static WorldData load(const std::string& dir);
};

// Keyed noise streams, reproducible independently of generation order.
Rng keyed_rng(uint64_t seed, uint64_t stream, uint64_t a, uint64_t b);

uint64_t fnv1a_file(const std::string& path);

}  // namespace airgrid
