#pragma once

// Per-stage energy decomposition and volume propagation. A pipeline's
// total energy splits into three categories: operational (cpu + memory),
// transmission between consecutive stages (and to the consumer), and
// observation (monitoring). Profiles are normalized to the pipeline's
// source volume, 1 GB by default, and scale linearly with it.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pipeprof/core.hpp"

namespace pipeprof {

// ---------------------------------------------------------------------------
// Transformation factors

enum class TfClass { compression, expansion, preservation };

std::string_view to_string(TfClass c);

/// |TF - 1| <= epsilon counts as size preservation.
inline constexpr double kPreservationEpsilon = 0.01;

/// Trichotomy: compression below 1 - epsilon, expansion above
/// 1 + epsilon, preservation in between (inclusive).
TfClass classify_tf(double factor, double epsilon = kPreservationEpsilon);

/// Output volume per unit of input volume, from the record's
/// measurement reference. Errors: zero_input_volume.
double transformation_factor(const StageRecord& record);

/// Data volume seen by one stage after propagation from the source.
struct VolumeState {
  std::string stage_id;
  double input_gb = 0.0;   // > 0 except downstream of a volume collapse
  double output_gb = 0.0;  // = factor * input_gb
  double factor = 1.0;
  TfClass tf_class = TfClass::preservation;

  bool operator==(const VolumeState&) const = default;
};

struct VolumeChain {
  std::vector<VolumeState> stages;
  /// Position of the first non-terminal stage whose output dropped to
  /// zero, if any. Downstream stages carry zero volumes (and therefore
  /// zero energy); a collapse is reported, not fatal.
  std::optional<std::size_t> collapse_at;
};

/// Chains volumes through the pipeline: stage 1 sees the source volume,
/// stage k+1 sees stage k's output.
VolumeChain propagate_volumes(const Pipeline& p, const StageCatalog& catalog,
                              double epsilon = kPreservationEpsilon);

// ---------------------------------------------------------------------------
// Energy decomposition

struct StageEnergyBreakdown {
  std::string stage_id;
  double cpu_j = 0.0;
  double memory_j = 0.0;
  double operational_j = 0.0;   // cpu_j + memory_j, exact
  double transmission_j = 0.0;  // this stage's output to the next hop
  double observation_j = 0.0;

  bool operator==(const StageEnergyBreakdown&) const = default;
};

/// Energy of running one stage on `placement_party` and shipping its
/// output to `next_party` (the next stage's party, or the consumer for
/// the terminal stage). Transmission is priced cross-party when the two
/// parties differ, intra-party otherwise.
StageEnergyBreakdown stage_energy(const StageRecord& record, const VolumeState& vol,
                                  std::string_view placement_party, std::string_view next_party,
                                  const EnergyCoefficients& coeffs);

struct StageProfile {
  StageEnergyBreakdown energy;
  VolumeState volume;

  bool operator==(const StageProfile&) const = default;
};

/// Full decomposition of one pipeline: per-stage breakdowns plus the
/// three category totals, normalized to the source volume the profile
/// was computed at.
struct PipelineEnergyProfile {
  std::string pipeline_id;
  std::vector<StageProfile> stages;
  double transmission_j = 0.0;  // sum of per-stage transmission
  double observation_j = 0.0;   // sum of per-stage observation
  double total_j = 0.0;         // operational + transmission + observation
  double normalized_to_gb = 1.0;
  std::optional<std::size_t> collapse_at;

  double operational_j() const;

  bool operator==(const PipelineEnergyProfile&) const = default;
};

/// Profiles a validated pipeline against a catalog and coefficient set.
PipelineEnergyProfile pipeline_energy(const Pipeline& p, const StageCatalog& catalog,
                                      const EnergyCoefficients& coeffs,
                                      double epsilon = kPreservationEpsilon);

/// Rescales a profile to a different source volume. Every energy and
/// volume field is linear in the source, so this is exact up to fp.
/// Errors: non_positive_volume.
PipelineEnergyProfile scale_profile(const PipelineEnergyProfile& profile, double volume_gb);

}  // namespace pipeprof
