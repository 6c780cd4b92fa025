#pragma once

// Pairwise common-stage analysis for pipelines of the same provider:
// detection of stages shared in order, their energy share, the
// dominance condition that makes reuse presumptively efficient, and
// the weighted feasibility score that folds in non-energy qualities.

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pipeprof/core.hpp"
#include "pipeprof/energy.hpp"

namespace pipeprof {

/// StrictPrefix finds the shared upstream run that can physically be
/// executed once (reusable-type stages only); ContiguousSubsequence
/// finds the longest common run anywhere, for reporting parity.
enum class DetectionPolicy { strict_prefix, contiguous_subsequence };

std::string_view to_string(DetectionPolicy policy);

struct CommonStageReport {
  std::string pipeline_a;
  std::string pipeline_b;
  std::vector<std::string> common;  // ordered, a subsequence of both pipelines
  double common_energy_j = 0.0;     // evaluated on pipeline a's volume chain
  double ratio_a = 0.0;             // common_energy_j / E_p(a), in [0, 1]
  double ratio_b = 0.0;
  DetectionPolicy policy = DetectionPolicy::contiguous_subsequence;

  bool operator==(const CommonStageReport&) const = default;
};

/// Common stages of two pipelines of the same provider.
///
/// strict_prefix: longest common prefix, truncated at the first stage
/// whose type the reuse policy does not allow.
/// contiguous_subsequence: longest run of stage ids contiguous in both
/// sequences; ties break to the earliest start in a, then in b.
/// Errors: provider_mismatch.
std::vector<std::string> common_stages(const Pipeline& a, const Pipeline& b, DetectionPolicy policy,
                                       const StageCatalog& catalog, const TypeReusePolicy& reuse = {});

/// Energy of the common stages within profile_a: operational plus
/// observation for every common stage, plus transmission for all but
/// the last. The last common stage's outbound hop sits on the
/// divergence boundary and is charged to the remainder instead.
/// Errors: stage_not_in_profile.
double common_energy(std::span<const std::string> common, const PipelineEnergyProfile& profile_a);

/// (E_CO / E_p(a), E_CO / E_p(b)). Values beyond [0,1] by at most 1e-9
/// are clamped; anything worse signals a model bug.
/// Errors: zero_pipeline_energy, ratio_out_of_range.
std::pair<double, double> savings_ratios(double common_energy_j, double total_a_j, double total_b_j);

struct DominanceResult {
  bool pipeline_a = false;
  bool pipeline_b = false;

  bool both() const { return pipeline_a && pipeline_b; }

  bool operator==(const DominanceResult&) const = default;
};

/// "Noticeably higher" operationalized as a multiplicative factor.
inline constexpr double kDominanceFactor = 2.0;

/// Per pipeline: true iff the common stages' operational energy is at
/// least `factor` times the boundary transmission plus the remaining
/// stages' operational energy (inclusive at the threshold). Empty
/// common yields false for both.
DominanceResult dominance_check(const PipelineEnergyProfile& profile_a,
                                const PipelineEnergyProfile& profile_b,
                                std::span<const std::string> common,
                                double factor = kDominanceFactor);

// ---------------------------------------------------------------------------
// Feasibility (weighted decision)

struct QualityFactor {
  std::string name;
  double weight = 1.0;  // > 0
  double delta = 0.0;   // signed: positive improves, negative degrades

  bool operator==(const QualityFactor&) const = default;
};

struct FeasibilityInput {
  double energy_weight = 1.0;  // > 0
  double energy_saving = 0.0;  // > 0
  std::vector<QualityFactor> qualities;
};

enum class Decision { consider_reuse, skip };

std::string_view to_string(Decision d);

struct FeasibilityResult {
  double score = 0.0;  // Z
  Decision decision = Decision::skip;  // consider_reuse iff score > 0

  bool operator==(const FeasibilityResult&) const = default;
};

/// Z = W_E * E_r + sum(W_k * Q_k). Zero is a skip: no estimated net
/// benefit, no configuration churn.
/// Errors: non_positive_weight, non_positive_energy_saving.
FeasibilityResult feasibility_score(const FeasibilityInput& input);

/// Assembles the full pairwise report from precomputed profiles.
CommonStageReport build_common_report(const Pipeline& a, const Pipeline& b,
                                      const PipelineEnergyProfile& profile_a,
                                      const PipelineEnergyProfile& profile_b, DetectionPolicy policy,
                                      const StageCatalog& catalog, const TypeReusePolicy& reuse = {});

}  // namespace pipeprof
