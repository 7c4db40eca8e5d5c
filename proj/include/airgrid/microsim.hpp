#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "airgrid/ingest.hpp"

namespace airgrid {

// Survey respondents: categorical attributes plus a travel diary giving the
// transport mode in use (if any) per day kind and hour.
struct Respondent {
  std::string respondent_id;
  std::vector<std::string> attributes;  // one value per dimension
  // [day_kind][hour] -> mode or nullopt when not travelling.
  std::array<std::array<std::optional<TransportMode>, 24>, 3> diary;
};

struct SurveySeed {
  std::vector<std::string> dimensions;  // attribute dimension names
  std::vector<Respondent> respondents;
};

// region -> dimension -> category -> target count.
using MarginalConstraints =
    std::map<std::string, std::map<std::string, std::map<std::string, double>>>;

struct IpfDiagnostics {
  int sweeps = 0;
  bool converged = false;
  double max_relative_error = 0.0;
  // Max relative marginal error after each full sweep.
  std::vector<double> error_per_sweep;
  // Pearson correlation between fitted and target marginal vectors.
  double pearson = 0.0;
};

struct IpfResult {
  std::vector<double> weights;  // parallel to seed.respondents
  IpfDiagnostics diagnostics;
};

// Classic iterative proportional fitting for one region: rescale weights so
// each dimension's weighted category totals match the targets, sweeping
// dimensions until the largest relative marginal error drops below tol.
// Categories with a positive target but zero seed support are unfittable and
// reported as an error, as are inconsistent per-dimension totals.
IpfResult ipf_fit(const SurveySeed& seed,
                  const std::map<std::string, std::map<std::string, double>>& targets,
                  int max_sweeps = 1000, double tol = 1e-6);

// Fits every region in the constraints.
std::map<std::string, IpfResult> ipf_fit_all(const SurveySeed& seed,
                                             const MarginalConstraints& constraints,
                                             int max_sweeps = 1000, double tol = 1e-6);

struct TravelProfileResult {
  // Normalized per-mode 24-vectors (unit sum for modes with any travel).
  std::array<std::array<double, 24>, kNumTransportModes> profile;
  std::array<bool, kNumTransportModes> has_travel;
};

// profile[mode][h] = weighted count of respondents travelling by that mode at
// hour h, normalized per mode. Scaling all weights leaves profiles unchanged.
TravelProfileResult travel_profile_from_weights(const SurveySeed& seed,
                                                const std::vector<double>& weights,
                                                DayKind day_kind);

// Loaders: survey attributes CSV + diary CSV; marginals CSV.
SurveySeed load_survey(const std::string& attributes_path, const std::string& diary_path);
MarginalConstraints load_marginals(const std::string& path);

}  // namespace airgrid
