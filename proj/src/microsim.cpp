#include "airgrid/microsim.hpp"

#include <algorithm>
#include <cmath>

#include "airgrid/csv.hpp"
#include "airgrid/errors.hpp"

namespace airgrid {

namespace {

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double num = 0.0, da = 0.0, db = 0.0;
  for (size_t i = 0; i < n; ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    da += (a[i] - ma) * (a[i] - ma);
    db += (b[i] - mb) * (b[i] - mb);
  }
  if (da <= 0.0 || db <= 0.0) return 1.0;  // degenerate: a single category
  return num / std::sqrt(da * db);
}

}  // namespace

IpfResult ipf_fit(const SurveySeed& seed,
                  const std::map<std::string, std::map<std::string, double>>& targets,
                  int max_sweeps, double tol) {
  const size_t n = seed.respondents.size();
  if (n == 0) throw ValidationError("ipf_fit: empty survey seed");
  if (targets.empty()) throw ValidationError("ipf_fit: no marginal constraints");

  // Dimension index + respondent membership per (dimension, category).
  struct Dim {
    size_t attr_index;
    std::vector<std::string> categories;
    std::vector<double> target;
    std::vector<std::vector<int32_t>> members;  // respondents per category
  };
  std::vector<Dim> dims;
  double expected_total = -1.0;
  for (const auto& [dim_name, cats] : targets) {
    const auto it =
        std::find(seed.dimensions.begin(), seed.dimensions.end(), dim_name);
    if (it == seed.dimensions.end())
      throw ValidationError("ipf_fit: survey has no dimension '" + dim_name + "'");
    Dim d;
    d.attr_index = static_cast<size_t>(it - seed.dimensions.begin());
    double total = 0.0;
    for (const auto& [cat, count] : cats) {
      if (count < 0.0) throw ValidationError("ipf_fit: negative marginal target");
      d.categories.push_back(cat);
      d.target.push_back(count);
      total += count;
      d.members.emplace_back();
    }
    if (expected_total < 0.0) {
      expected_total = total;
    } else if (std::fabs(total - expected_total) >
               1e-6 * std::max(1.0, expected_total)) {
      throw ValidationError("ipf_fit: inconsistent marginals, dimension '" + dim_name +
                            "' totals " + std::to_string(total) + " vs " +
                            std::to_string(expected_total));
    }
    for (size_t r = 0; r < n; ++r) {
      const std::string& v = seed.respondents[r].attributes[d.attr_index];
      const auto cit = std::find(d.categories.begin(), d.categories.end(), v);
      if (cit != d.categories.end())
        d.members[static_cast<size_t>(cit - d.categories.begin())].push_back(
            static_cast<int32_t>(r));
    }
    for (size_t c = 0; c < d.categories.size(); ++c) {
      if (d.target[c] > 0.0 && d.members[c].empty())
        throw ValidationError("ipf_fit: category '" + d.categories[c] + "' of dimension '" +
                              dim_name + "' has a positive target but no seed support");
    }
    dims.push_back(std::move(d));
  }

  IpfResult result;
  result.weights.assign(n, 1.0);
  auto& w = result.weights;

  auto max_rel_error = [&] {
    double worst = 0.0;
    for (const Dim& d : dims) {
      for (size_t c = 0; c < d.categories.size(); ++c) {
        double got = 0.0;
        for (int32_t r : d.members[c]) got += w[static_cast<size_t>(r)];
        const double denom = std::max(d.target[c], 1.0);
        worst = std::max(worst, std::fabs(got - d.target[c]) / denom);
      }
    }
    return worst;
  };

  int sweep = 0;
  double err = max_rel_error();
  while (err >= tol && sweep < max_sweeps) {
    for (const Dim& d : dims) {
      for (size_t c = 0; c < d.categories.size(); ++c) {
        double got = 0.0;
        for (int32_t r : d.members[c]) got += w[static_cast<size_t>(r)];
        if (got <= 0.0) continue;  // zero target with zero support
        const double factor = d.target[c] / got;
        for (int32_t r : d.members[c]) w[static_cast<size_t>(r)] *= factor;
      }
    }
    ++sweep;
    err = max_rel_error();
    result.diagnostics.error_per_sweep.push_back(err);
  }

  result.diagnostics.sweeps = sweep;
  result.diagnostics.max_relative_error = err;
  result.diagnostics.converged = err < tol;

  std::vector<double> fitted, wanted;
  for (const Dim& d : dims) {
    for (size_t c = 0; c < d.categories.size(); ++c) {
      double got = 0.0;
      for (int32_t r : d.members[c]) got += w[static_cast<size_t>(r)];
      fitted.push_back(got);
      wanted.push_back(d.target[c]);
    }
  }
  result.diagnostics.pearson = pearson(fitted, wanted);
  return result;
}

std::map<std::string, IpfResult> ipf_fit_all(const SurveySeed& seed,
                                             const MarginalConstraints& constraints,
                                             int max_sweeps, double tol) {
  std::map<std::string, IpfResult> out;
  for (const auto& [region, targets] : constraints)
    out.emplace(region, ipf_fit(seed, targets, max_sweeps, tol));
  return out;
}

TravelProfileResult travel_profile_from_weights(const SurveySeed& seed,
                                                const std::vector<double>& weights,
                                                DayKind day_kind) {
  if (weights.size() != seed.respondents.size())
    throw ValidationError("travel_profile_from_weights: weight vector length mismatch");
  TravelProfileResult out{};
  for (auto& p : out.profile) p.fill(0.0);
  out.has_travel.fill(false);

  const size_t dk = static_cast<size_t>(day_kind);
  for (size_t r = 0; r < seed.respondents.size(); ++r) {
    const auto& diary = seed.respondents[r].diary[dk];
    for (int h = 0; h < 24; ++h) {
      if (!diary[static_cast<size_t>(h)]) continue;
      const int m = static_cast<int>(*diary[static_cast<size_t>(h)]);
      out.profile[static_cast<size_t>(m)][static_cast<size_t>(h)] += weights[r];
    }
  }
  for (int m = 0; m < kNumTransportModes; ++m) {
    double sum = 0.0;
    for (double v : out.profile[static_cast<size_t>(m)]) sum += v;
    if (sum > 0.0) {
      out.has_travel[static_cast<size_t>(m)] = true;
      for (double& v : out.profile[static_cast<size_t>(m)]) v /= sum;
    }
  }
  return out;
}

SurveySeed load_survey(const std::string& attributes_path, const std::string& diary_path) {
  SurveySeed seed;
  std::map<std::string, size_t> index_by_id;
  {
    csv::Reader r(attributes_path);
    if (r.header().size() < 2)
      throw ValidationError("'" + attributes_path + "': expected respondent_id,attr...");
    seed.dimensions.assign(r.header().begin() + 1, r.header().end());
    std::vector<std::string> f;
    while (r.next(f)) {
      if (f.size() != r.header().size())
        throw ValidationError("'" + attributes_path + "' line " +
                              std::to_string(r.line_number()) + ": field count mismatch");
      Respondent resp;
      resp.respondent_id = f[0];
      resp.attributes.assign(f.begin() + 1, f.end());
      index_by_id[resp.respondent_id] = seed.respondents.size();
      seed.respondents.push_back(std::move(resp));
    }
  }
  {
    csv::Reader r(diary_path);
    std::vector<std::string> f;
    while (r.next(f)) {
      if (f.size() != 4)
        throw ValidationError("'" + diary_path + "' line " +
                              std::to_string(r.line_number()) +
                              ": expected respondent_id,day_kind,hour,mode");
      const auto it = index_by_id.find(f[0]);
      if (it == index_by_id.end())
        throw ValidationError("'" + diary_path + "': unknown respondent '" + f[0] + "'");
      const DayKind dk = day_kind_from_string(f[1]);
      const int hour = static_cast<int>(csv::parse_int(f[2], diary_path));
      if (hour < 0 || hour > 23)
        throw ValidationError("'" + diary_path + "': hour out of range");
      seed.respondents[it->second].diary[static_cast<size_t>(dk)][static_cast<size_t>(
          hour)] = transport_mode_from_string(f[3]);
    }
  }
  return seed;
}

MarginalConstraints load_marginals(const std::string& path) {
  csv::Reader r(path);
  MarginalConstraints out;
  std::vector<std::string> f;
  while (r.next(f)) {
    if (f.size() != 4)
      throw ValidationError("'" + path + "' line " + std::to_string(r.line_number()) +
                            ": expected region_id,dimension,category,target_count");
    out[f[0]][f[1]][f[2]] += csv::parse_double(f[3], path);
  }
  return out;
}

}  // namespace airgrid
