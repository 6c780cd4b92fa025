#include "pipeprof/planner.hpp"

#include <fmt/core.h>

#include <algorithm>

namespace pipeprof {

std::string_view to_string(SavingMode mode) {
  return mode == SavingMode::relative ? "relative" : "raw_joules";
}

namespace {

// Category sums kept separate so the grand total is assembled the same
// way a standalone profile assembles its own.
struct EnergySums {
  double operational = 0.0;
  double transmission = 0.0;
  double observation = 0.0;

  void take(const StageEnergyBreakdown& e) {
    operational += e.operational_j;
    transmission += e.transmission_j;
    observation += e.observation_j;
  }

  double total() const { return operational + transmission + observation; }
};

VolumeState volume_step(const StageRecord& record, double input_gb, double* next) {
  VolumeState vol;
  vol.stage_id = record.stage_id;
  vol.input_gb = input_gb;
  vol.factor = transformation_factor(record);
  vol.output_gb = vol.factor * input_gb;
  vol.tf_class = classify_tf(vol.factor);
  *next = vol.output_gb;
  return vol;
}

bool contains(const std::vector<std::string>& haystack, const std::string& needle) {
  return std::find(haystack.begin(), haystack.end(), needle) != haystack.end();
}

Pipeline all_provider(Pipeline p) {
  for (PlacedStage& stage : p.stages) stage.placement = Side::provider;
  return p;
}

}  // namespace

void estimate_configuration(ExecutionConfiguration& config, const Pipeline& a, const Pipeline& b,
                            const StageCatalog& catalog, const EnergyCoefficients& coeffs) {
  if (a.provider.party_id != b.provider.party_id) {
    throw Error(Errc::provider_mismatch,
                fmt::format("pipelines '{}' and '{}' have different providers ('{}' vs '{}')",
                            a.pipeline_id, b.pipeline_id, a.provider.party_id, b.provider.party_id));
  }
  if (config.branches.size() != 2) {
    throw Error(Errc::invalid_spec,
                fmt::format("configuration '{}' must carry one branch per pipeline, got {}",
                            config.config_id, config.branches.size()));
  }
  const std::string& provider_id = a.provider.party_id;

  EnergySums sums;
  EnergySums shared_sums;
  double volume = a.source_volume_gb;
  for (std::size_t i = 0; i < config.shared_stages.size(); ++i) {
    const StageRecord& record = catalog.at(config.shared_stages[i]);
    const VolumeState vol = volume_step(record, volume, &volume);
    StageEnergyBreakdown e = stage_energy(record, vol, provider_id, provider_id, coeffs);
    // Consecutive shared stages are linked by intra-provider hops; the
    // last one fans out instead, priced per branch below.
    if (i + 1 == config.shared_stages.size()) e.transmission_j = 0.0;
    sums.take(e);
    shared_sums.take(e);
  }
  config.shared_j = shared_sums.total();
  const double shared_out = volume;
  const bool fed_by_shared = !config.shared_stages.empty();

  const Pipeline* pipelines[2] = {&a, &b};
  for (std::size_t bi = 0; bi < config.branches.size(); ++bi) {
    BranchPlan& branch = config.branches[bi];
    const Pipeline& p = *pipelines[bi];
    EnergySums local;
    double input = fed_by_shared ? shared_out : p.source_volume_gb;
    if (fed_by_shared) {
      // Handoff from the shared prefix to wherever this branch starts;
      // an empty branch means delivery straight to the consumer.
      const bool to_consumer = branch.stages.empty() || branch.consumer_offload_from == 0;
      const PartyCoefficients& c = coeffs.for_party(provider_id);
      const std::string& dest = to_consumer ? p.consumer.party_id : provider_id;
      const double per_gb = dest == provider_id ? c.joules_per_gb_transmitted_intra_party
                                                : c.joules_per_gb_transmitted_cross_party;
      const double hop = shared_out * per_gb;
      sums.transmission += hop;
      local.transmission += hop;
    }
    for (std::size_t j = 0; j < branch.stages.size(); ++j) {
      const StageRecord& record = catalog.at(branch.stages[j]);
      const VolumeState vol = volume_step(record, input, &input);
      const std::string& placement =
          j >= branch.consumer_offload_from ? p.consumer.party_id : provider_id;
      const std::string& next =
          j + 1 < branch.stages.size()
              ? (j + 1 >= branch.consumer_offload_from ? p.consumer.party_id : provider_id)
              : p.consumer.party_id;
      const StageEnergyBreakdown e = stage_energy(record, vol, placement, next, coeffs);
      sums.take(e);
      local.take(e);
    }
    branch.energy_j = local.total();
  }
  config.estimated_j = sums.total();
}

std::vector<ExecutionConfiguration> enumerate_configurations(const Pipeline& a, const Pipeline& b,
                                                             const StageCatalog& catalog,
                                                             const EnergyCoefficients& coeffs,
                                                             const PlannerOptions& options) {
  const auto prefix = common_stages(a, b, DetectionPolicy::strict_prefix, catalog, options.reuse);
  const auto ids_a = a.stage_ids();
  const auto ids_b = b.stage_ids();
  const std::size_t max_shared = prefix.size();
  const std::size_t unique_a = ids_a.size() - max_shared;
  const std::size_t unique_b = ids_b.size() - max_shared;

  // The plan space assumes everything starts at the provider, whatever
  // placements the inputs carry.
  const double baseline =
      pipeline_energy(all_provider(a), catalog, coeffs, options.epsilon).total_j +
      pipeline_energy(all_provider(b), catalog, coeffs, options.epsilon).total_j;

  std::vector<ExecutionConfiguration> configs;
  const auto push_config = [&](std::size_t shared, std::size_t offload_a, std::size_t offload_b) {
    ExecutionConfiguration cfg;
    cfg.config_id = fmt::format("cfg_l{}_a{}_b{}", shared, offload_a, offload_b);
    cfg.shared_stages.assign(ids_a.begin(), ids_a.begin() + static_cast<std::ptrdiff_t>(shared));

    const auto make_branch = [&](const Pipeline& p, const std::vector<std::string>& ids,
                                 std::size_t offload) {
      BranchPlan branch;
      branch.pipeline_id = p.pipeline_id;
      branch.stages.assign(ids.begin() + static_cast<std::ptrdiff_t>(shared), ids.end());
      branch.consumer_offload_from = branch.stages.size() - offload;
      return branch;
    };
    cfg.branches.push_back(make_branch(a, ids_a, offload_a));
    cfg.branches.push_back(make_branch(b, ids_b, offload_b));

    for (const BranchPlan& branch : cfg.branches) {
      for (std::size_t j = branch.consumer_offload_from; j < branch.stages.size(); ++j) {
        if (contains(options.non_offloadable_stages, branch.stages[j])) return;
      }
    }

    estimate_configuration(cfg, a, b, catalog, coeffs);
    cfg.baseline_j = baseline;
    cfg.saving_j = baseline - cfg.estimated_j;
    configs.push_back(std::move(cfg));
  };

  if (max_shared == 0) {
    // Nothing shareable: splitting would only add handoffs, so the
    // independent baseline is the single candidate.
    push_config(0, 0, 0);
    return configs;
  }
  for (std::size_t shared = 0; shared <= max_shared; ++shared) {
    // Offloads range over the unique suffixes only; prefix stages left
    // unshared in this configuration still run at the provider.
    for (std::size_t offload_a = 0; offload_a <= unique_a; ++offload_a) {
      for (std::size_t offload_b = 0; offload_b <= unique_b; ++offload_b) {
        push_config(shared, offload_a, offload_b);
      }
    }
  }
  return configs;
}

PlanSet recommend(const Pipeline& a, const Pipeline& b, const StageCatalog& catalog,
                  const EnergyCoefficients& coeffs, const FeasibilityWeights& weights,
                  const PlannerOptions& options) {
  PlanSet set;
  auto configs = enumerate_configurations(a, b, catalog, coeffs, options);
  set.plans.reserve(configs.size());
  for (auto& cfg : configs) {
    ReusePlan plan;
    plan.config = std::move(cfg);
    if (plan.config.saving_j > 0.0) {
      FeasibilityInput input;
      input.energy_weight = weights.energy_weight;
      input.energy_saving = weights.mode == SavingMode::relative
                                ? plan.config.saving_j / plan.config.baseline_j
                                : plan.config.saving_j;
      input.qualities = weights.qualities;
      plan.feasibility = feasibility_score(input);
    }
    set.plans.push_back(std::move(plan));
  }
  std::stable_sort(set.plans.begin(), set.plans.end(), [](const ReusePlan& x, const ReusePlan& y) {
    return x.config.saving_j > y.config.saving_j;
  });
  const ReusePlan& best = set.plans.front();
  set.no_reuse_recommended = !(best.config.saving_j > 0.0) || best.decision() == Decision::skip;
  return set;
}

}  // namespace pipeprof
