#include "pipeprof/reuse.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>

namespace pipeprof {

std::string_view to_string(DetectionPolicy policy) {
  switch (policy) {
    case DetectionPolicy::strict_prefix: return "strict_prefix";
    case DetectionPolicy::contiguous_subsequence: return "contiguous_subsequence";
  }
  return "unknown";
}

std::string_view to_string(Decision d) {
  return d == Decision::consider_reuse ? "consider_reuse" : "skip";
}

namespace {

std::vector<std::string> strict_prefix(const std::vector<std::string>& a, const std::vector<std::string>& b,
                                       const StageCatalog& catalog, const TypeReusePolicy& reuse) {
  std::vector<std::string> out;
  const std::size_t limit = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < limit; ++i) {
    if (a[i] != b[i]) break;
    // A non-reusable stage type ends the shareable prefix even when the
    // ids keep matching past it; its output is consumer specific.
    if (!reuse.is_reusable(catalog.at(a[i]).stage_type)) break;
    out.push_back(a[i]);
  }
  return out;
}

std::vector<std::string> longest_common_run(const std::vector<std::string>& a,
                                            const std::vector<std::string>& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::size_t best_len = 0;
  std::size_t best_start_a = 0;
  std::size_t best_start_b = 0;
  // run[j]: length of the common run ending at a[i-1], b[j-1].
  std::vector<std::size_t> run(m + 1, 0);
  std::vector<std::size_t> prev(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      run[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : 0;
      if (run[j] == 0) continue;
      const std::size_t start_a = i - run[j];
      const std::size_t start_b = j - run[j];
      const bool longer = run[j] > best_len;
      const bool tie = run[j] == best_len &&
                       (start_a < best_start_a ||
                        (start_a == best_start_a && start_b < best_start_b));
      if (longer || tie) {
        best_len = run[j];
        best_start_a = start_a;
        best_start_b = start_b;
      }
    }
    std::swap(run, prev);
  }
  return {a.begin() + static_cast<std::ptrdiff_t>(best_start_a),
          a.begin() + static_cast<std::ptrdiff_t>(best_start_a + best_len)};
}

// Matches each common id to the next not-yet-used profile stage with
// that id, preserving order. Returns indices into profile.stages.
std::vector<std::size_t> match_in_order(std::span<const std::string> common,
                                        const PipelineEnergyProfile& profile) {
  std::vector<std::size_t> indices;
  indices.reserve(common.size());
  std::size_t cursor = 0;
  for (const auto& id : common) {
    while (cursor < profile.stages.size() && profile.stages[cursor].volume.stage_id != id) ++cursor;
    if (cursor == profile.stages.size()) {
      throw Error(Errc::stage_not_in_profile,
                  fmt::format("stage '{}' not found in order within profile of '{}'", id,
                              profile.pipeline_id));
    }
    indices.push_back(cursor++);
  }
  return indices;
}

}  // namespace

std::vector<std::string> common_stages(const Pipeline& a, const Pipeline& b, DetectionPolicy policy,
                                       const StageCatalog& catalog, const TypeReusePolicy& reuse) {
  if (a.provider.party_id != b.provider.party_id) {
    throw Error(Errc::provider_mismatch,
                fmt::format("pipelines '{}' and '{}' have different providers ('{}' vs '{}')",
                            a.pipeline_id, b.pipeline_id, a.provider.party_id, b.provider.party_id));
  }
  const auto ids_a = a.stage_ids();
  const auto ids_b = b.stage_ids();
  if (policy == DetectionPolicy::strict_prefix) return strict_prefix(ids_a, ids_b, catalog, reuse);
  return longest_common_run(ids_a, ids_b);
}

double common_energy(std::span<const std::string> common, const PipelineEnergyProfile& profile_a) {
  if (common.empty()) return 0.0;
  const auto indices = match_in_order(common, profile_a);
  double total = 0.0;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto& stage = profile_a.stages[indices[k]].energy;
    total += stage.operational_j + stage.observation_j;
    // The hop out of the last common stage crosses the divergence
    // boundary, so it belongs to the non-shared remainder.
    if (k + 1 < indices.size()) total += stage.transmission_j;
  }
  return total;
}

std::pair<double, double> savings_ratios(double common_energy_j, double total_a_j, double total_b_j) {
  const auto one = [&](double total, std::string_view which) {
    if (!(total > 0.0)) {
      throw Error(Errc::zero_pipeline_energy,
                  fmt::format("pipeline {} has non-positive total energy {}", which, total));
    }
    double ratio = common_energy_j / total;
    // Tiny excursions are accumulated rounding; anything larger means
    // the common set was priced against the wrong profile.
    constexpr double slack = 1e-9;
    if (ratio < 0.0 || ratio > 1.0) {
      if (ratio >= -slack && ratio <= 1.0 + slack) {
        ratio = std::clamp(ratio, 0.0, 1.0);
      } else {
        throw Error(Errc::ratio_out_of_range,
                    fmt::format("common-energy ratio {} for pipeline {} falls outside [0, 1]", ratio,
                                which));
      }
    }
    return ratio;
  };
  return {one(total_a_j, "a"), one(total_b_j, "b")};
}

DominanceResult dominance_check(const PipelineEnergyProfile& profile_a,
                                const PipelineEnergyProfile& profile_b,
                                std::span<const std::string> common, double factor) {
  if (common.empty()) return {};
  const auto holds_for = [&](const PipelineEnergyProfile& profile) {
    const auto indices = match_in_order(common, profile);
    double common_op = 0.0;
    for (const auto idx : indices) common_op += profile.stages[idx].energy.operational_j;
    double rest_op = 0.0;
    std::size_t next = 0;
    for (std::size_t i = 0; i < profile.stages.size(); ++i) {
      if (next < indices.size() && indices[next] == i) {
        ++next;
        continue;
      }
      rest_op += profile.stages[i].energy.operational_j;
    }
    const double boundary = profile.stages[indices.back()].energy.transmission_j;
    return common_op >= factor * (boundary + rest_op);
  };
  return {holds_for(profile_a), holds_for(profile_b)};
}

FeasibilityResult feasibility_score(const FeasibilityInput& input) {
  if (!(input.energy_weight > 0.0)) {
    throw Error(Errc::non_positive_weight,
                fmt::format("energy weight must be positive, got {}", input.energy_weight));
  }
  for (const auto& q : input.qualities) {
    if (!(q.weight > 0.0)) {
      throw Error(Errc::non_positive_weight,
                  fmt::format("weight for quality '{}' must be positive, got {}", q.name, q.weight));
    }
  }
  if (!(input.energy_saving > 0.0)) {
    throw Error(Errc::non_positive_energy_saving,
                fmt::format("energy saving must be positive, got {}", input.energy_saving));
  }
  double score = input.energy_weight * input.energy_saving;
  for (const auto& q : input.qualities) score += q.weight * q.delta;
  return {score, score > 0.0 ? Decision::consider_reuse : Decision::skip};
}

CommonStageReport build_common_report(const Pipeline& a, const Pipeline& b,
                                      const PipelineEnergyProfile& profile_a,
                                      const PipelineEnergyProfile& profile_b, DetectionPolicy policy,
                                      const StageCatalog& catalog, const TypeReusePolicy& reuse) {
  CommonStageReport report;
  report.pipeline_a = a.pipeline_id;
  report.pipeline_b = b.pipeline_id;
  report.policy = policy;
  report.common = common_stages(a, b, policy, catalog, reuse);
  report.common_energy_j = common_energy(report.common, profile_a);
  std::tie(report.ratio_a, report.ratio_b) =
      savings_ratios(report.common_energy_j, profile_a.total_j, profile_b.total_j);
  return report;
}

}  // namespace pipeprof
