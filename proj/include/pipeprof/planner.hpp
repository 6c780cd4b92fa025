#pragma once

// Enumeration and scoring of split execution configurations for a
// pipeline pair with a shareable prefix: the prefix runs once on the
// provider, then each pipeline's remainder runs as its own branch,
// optionally offloading a tail of its unique stages to its consumer.

#include <optional>
#include <string>
#include <vector>

#include "pipeprof/core.hpp"
#include "pipeprof/energy.hpp"
#include "pipeprof/reuse.hpp"

namespace pipeprof {

struct BranchPlan {
  std::string pipeline_id;
  std::vector<std::string> stages;  // remainder after the shared prefix, in order
  // Index into `stages`: everything from here on runs at the consumer.
  // stages.size() means the whole branch stays on the provider.
  std::size_t consumer_offload_from = 0;
  double energy_j = 0.0;  // handoff into the branch + stages + terminal delivery

  std::size_t offload_count() const { return stages.size() - consumer_offload_from; }

  bool operator==(const BranchPlan&) const = default;
};

struct ExecutionConfiguration {
  std::string config_id;  // cfg_l<shared>_a<offload_a>_b<offload_b>
  std::vector<std::string> shared_stages;  // executed once, provider side
  std::vector<BranchPlan> branches;        // [a, b]
  double shared_j = 0.0;
  double estimated_j = 0.0;
  double baseline_j = 0.0;  // both pipelines independent, fully provider side
  double saving_j = 0.0;    // baseline_j - estimated_j

  bool operator==(const ExecutionConfiguration&) const = default;
};

struct PlannerOptions {
  TypeReusePolicy reuse;
  // Stages that must not run at a consumer (licensing, data residency).
  // Configurations that would offload one are dropped.
  std::vector<std::string> non_offloadable_stages;
  double epsilon = kPreservationEpsilon;
};

/// Fills shared_j, per-branch energy_j and estimated_j for a
/// configuration whose id, shared_stages and branch shapes are already
/// set. The shared prefix runs on pipeline a's source volume; each
/// branch continues from the shared output (from its own source when
/// nothing is shared) and ends with delivery to its consumer.
void estimate_configuration(ExecutionConfiguration& config, const Pipeline& a, const Pipeline& b,
                            const StageCatalog& catalog, const EnergyCoefficients& coeffs);

/// All configurations for the pair: shared prefix length 0..L crossed
/// with per-branch offload counts 0..unique_i, where L is the reusable
/// common prefix. Stages of the common prefix that are not shared in a
/// given configuration still run on the provider, so offloading only
/// applies to each pipeline's unique suffix. Without a shareable
/// prefix only the baseline configuration is returned.
/// Errors: provider_mismatch.
std::vector<ExecutionConfiguration> enumerate_configurations(const Pipeline& a, const Pipeline& b,
                                                             const StageCatalog& catalog,
                                                             const EnergyCoefficients& coeffs,
                                                             const PlannerOptions& options = {});

/// How the energy term entering the feasibility score is expressed.
enum class SavingMode { relative, raw_joules };

std::string_view to_string(SavingMode mode);

struct FeasibilityWeights {
  double energy_weight = 1.0;
  std::vector<QualityFactor> qualities;
  SavingMode mode = SavingMode::relative;
};

struct ReusePlan {
  ExecutionConfiguration config;
  // Unset when the configuration saves nothing; scoring needs a
  // positive saving.
  std::optional<FeasibilityResult> feasibility;

  Decision decision() const { return feasibility ? feasibility->decision : Decision::skip; }

  bool operator==(const ReusePlan&) const = default;
};

struct PlanSet {
  std::vector<ReusePlan> plans;  // best first: descending saving, stable
  bool no_reuse_recommended = false;

  const ReusePlan& best() const { return plans.front(); }
};

/// Enumerates, scores and ranks configurations for the pair. The
/// feasibility of each plan folds the energy term (relative saving or
/// raw joules per `weights.mode`) with the weighted quality deltas.
PlanSet recommend(const Pipeline& a, const Pipeline& b, const StageCatalog& catalog,
                  const EnergyCoefficients& coeffs, const FeasibilityWeights& weights = {},
                  const PlannerOptions& options = {});

}  // namespace pipeprof
