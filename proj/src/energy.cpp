#include "pipeprof/energy.hpp"

#include <fmt/format.h>

namespace pipeprof {

std::string_view to_string(TfClass c) {
  switch (c) {
    case TfClass::compression: return "compression";
    case TfClass::expansion: return "expansion";
    case TfClass::preservation: return "preservation";
  }
  return "preservation";
}

TfClass classify_tf(double factor, double epsilon) {
  if (factor < 1.0 - epsilon) return TfClass::compression;
  if (factor > 1.0 + epsilon) return TfClass::expansion;
  return TfClass::preservation;
}

double transformation_factor(const StageRecord& record) {
  if (!(record.input_data_volume > 0.0)) {
    throw Error(Errc::zero_input_volume,
                fmt::format("stage '{}' has no reference input volume", record.stage_id));
  }
  return record.output_data_volume / record.input_data_volume;
}

VolumeChain propagate_volumes(const Pipeline& p, const StageCatalog& catalog, double epsilon) {
  VolumeChain chain;
  chain.stages.reserve(p.stages.size());
  double volume = p.source_volume_gb;
  for (std::size_t i = 0; i < p.stages.size(); ++i) {
    const StageRecord& record = catalog.at(p.stages[i].stage_id);
    const double factor = transformation_factor(record);
    VolumeState state;
    state.stage_id = record.stage_id;
    state.input_gb = volume;
    state.output_gb = factor * volume;
    state.factor = factor;
    state.tf_class = classify_tf(factor, epsilon);
    if (state.output_gb == 0.0 && i + 1 < p.stages.size() && !chain.collapse_at.has_value()) {
      chain.collapse_at = i;
    }
    volume = state.output_gb;
    chain.stages.push_back(std::move(state));
  }
  return chain;
}

StageEnergyBreakdown stage_energy(const StageRecord& record, const VolumeState& vol,
                                  std::string_view placement_party, std::string_view next_party,
                                  const EnergyCoefficients& coeffs) {
  const PartyCoefficients& c = coeffs.for_party(placement_party);
  StageEnergyBreakdown out;
  out.stage_id = record.stage_id;
  out.cpu_j = record.cpu_usage_unit * vol.input_gb * c.joules_per_cpu_unit;
  out.memory_j = record.memory_usage_unit * vol.input_gb * c.joules_per_memory_unit;
  out.operational_j = out.cpu_j + out.memory_j;
  const double per_gb = placement_party == next_party ? c.joules_per_gb_transmitted_intra_party
                                                      : c.joules_per_gb_transmitted_cross_party;
  out.transmission_j = vol.output_gb * per_gb;
  out.observation_j = record.observation_unit * vol.input_gb * c.joules_per_observation_unit;
  return out;
}

double PipelineEnergyProfile::operational_j() const {
  double sum = 0.0;
  for (const StageProfile& stage : stages) sum += stage.energy.operational_j;
  return sum;
}

PipelineEnergyProfile pipeline_energy(const Pipeline& p, const StageCatalog& catalog,
                                      const EnergyCoefficients& coeffs, double epsilon) {
  VolumeChain chain = propagate_volumes(p, catalog, epsilon);
  PipelineEnergyProfile profile;
  profile.pipeline_id = p.pipeline_id;
  profile.normalized_to_gb = p.source_volume_gb;
  profile.collapse_at = chain.collapse_at;
  profile.stages.reserve(p.stages.size());

  double operational = 0.0;
  for (std::size_t i = 0; i < p.stages.size(); ++i) {
    const PlacedStage& placed = p.stages[i];
    const StageRecord& record = catalog.at(placed.stage_id);
    const std::string& placement_party = p.party(placed.placement).party_id;
    // the terminal stage always delivers to the consumer
    const std::string& next_party = i + 1 < p.stages.size()
                                        ? p.party(p.stages[i + 1].placement).party_id
                                        : p.consumer.party_id;
    StageProfile stage;
    stage.volume = chain.stages[i];
    stage.energy = stage_energy(record, stage.volume, placement_party, next_party, coeffs);
    operational += stage.energy.operational_j;
    profile.transmission_j += stage.energy.transmission_j;
    profile.observation_j += stage.energy.observation_j;
    profile.stages.push_back(std::move(stage));
  }
  profile.total_j = operational + profile.transmission_j + profile.observation_j;
  return profile;
}

PipelineEnergyProfile scale_profile(const PipelineEnergyProfile& profile, double volume_gb) {
  if (!(volume_gb > 0.0)) {
    throw Error(Errc::non_positive_volume, fmt::format("cannot scale profile to {} GB", volume_gb));
  }
  if (!(profile.normalized_to_gb > 0.0)) {
    throw Error(Errc::non_positive_volume,
                fmt::format("profile '{}' is normalized to {} GB", profile.pipeline_id, profile.normalized_to_gb));
  }
  const double ratio = volume_gb / profile.normalized_to_gb;
  PipelineEnergyProfile out = profile;
  for (StageProfile& stage : out.stages) {
    stage.energy.cpu_j *= ratio;
    stage.energy.memory_j *= ratio;
    stage.energy.operational_j = stage.energy.cpu_j + stage.energy.memory_j;
    stage.energy.transmission_j *= ratio;
    stage.energy.observation_j *= ratio;
    stage.volume.input_gb *= ratio;
    stage.volume.output_gb *= ratio;
  }
  out.transmission_j *= ratio;
  out.observation_j *= ratio;
  out.total_j *= ratio;
  out.normalized_to_gb = volume_gb;
  return out;
}

}  // namespace pipeprof
