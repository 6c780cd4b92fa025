#pragma once

// Synthetic-population protocol: generate a stage catalog and a set of
// pipelines from a seed, profile everything, and analyze every pair
// that shares stages. Identical seed and spec give byte-identical
// results on any platform, which is why sampling is hand-rolled on top
// of mt19937_64 rather than delegated to distribution objects.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pipeprof/core.hpp"
#include "pipeprof/energy.hpp"
#include "pipeprof/planner.hpp"
#include "pipeprof/reuse.hpp"

namespace pipeprof {

// ---------------------------------------------------------------------------
// Deterministic sampling primitives

/// Seed for a named substream of `root`, so catalog and population
/// draws stay independent of each other.
std::uint64_t derive_stream_seed(std::uint64_t root, std::uint64_t stream);

/// Uniform draw in [min, max); returns min exactly when the range is
/// degenerate.
double uniform_double(std::mt19937_64& rng, double min, double max);

/// Uniform integer in [0, n) by masked rejection. n = 0 or 1 returns 0
/// without consuming a draw.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);

// ---------------------------------------------------------------------------
// Population specification

struct ValueRange {
  double min = 0.0;
  double max = 0.0;

  bool operator==(const ValueRange&) const = default;
};

struct UsageRanges {
  ValueRange cpu{100.0, 1000.0};
  ValueRange memory{50.0, 500.0};
  // Degenerate volume ranges pin every transformation factor to 1, so
  // shared-stage energy can never exceed either pipeline's total.
  ValueRange input_volume{1.0, 1.0};
  ValueRange output_volume{1.0, 1.0};
  ValueRange observation{10.0, 100.0};

  bool operator==(const UsageRanges&) const = default;
};

struct TypeMix {
  std::size_t filtering = 3;
  std::size_t anonymization = 3;
  std::size_t aggregation = 3;
  std::size_t converting = 2;
  std::size_t custom = 0;

  std::size_t total() const { return filtering + anonymization + aggregation + converting + custom; }

  /// Even split across the four named types, remainder handed out in
  /// declaration order.
  static TypeMix for_size(std::size_t catalog_size);

  bool operator==(const TypeMix&) const = default;
};

struct PopulationSpec {
  std::size_t n_pipelines = 100;
  std::size_t catalog_size = 11;
  TypeMix type_mix;
  std::size_t min_len = 2;
  std::size_t max_len = 8;
  std::uint64_t seed = 0;
  UsageRanges usage_ranges;

  bool operator==(const PopulationSpec&) const = default;
};

/// Errors: invalid_spec when counts, lengths, mix or ranges are
/// inconsistent.
void validate_spec(const PopulationSpec& spec);

// ---------------------------------------------------------------------------
// Generation

/// Catalog of `catalog_size` stages with ids "1".."N", types shuffled
/// from the mix, usage fields drawn from the spec ranges.
StageCatalog generate_catalog(const PopulationSpec& spec);

/// Pipelines "p001".. of one shared provider, each with its own
/// consumer, built by sampling distinct catalog stages and emitting
/// them in catalog order.
std::vector<Pipeline> populate_pipelines(const PopulationSpec& spec, const StageCatalog& catalog);

// ---------------------------------------------------------------------------
// Pairwise analysis

struct MembershipMatrix {
  std::vector<std::string> stage_ids;     // rows
  std::vector<std::string> pipeline_ids;  // columns
  std::vector<std::vector<std::uint8_t>> cells;

  bool operator==(const MembershipMatrix&) const = default;
};

MembershipMatrix build_membership(const StageCatalog& catalog, const std::vector<Pipeline>& pipelines);

struct PairAnalysis {
  CommonStageReport report;
  DominanceResult dominance;
  ReusePlan best_plan;
  bool no_reuse_recommended = false;

  bool operator==(const PairAnalysis&) const = default;
};

struct SimulationOptions {
  FeasibilityWeights weights;
  PlannerOptions planner;
  double dominance_factor = kDominanceFactor;
  // Reporting looks for the longest shared run anywhere; planning
  // inside each pair always keys on the reusable prefix.
  DetectionPolicy report_policy = DetectionPolicy::contiguous_subsequence;
};

struct SimulationReport {
  PopulationSpec spec;
  EnergyCoefficients coefficients;
  StageCatalog catalog;
  std::vector<Pipeline> pipelines;
  std::vector<PipelineEnergyProfile> profiles;
  std::vector<PairAnalysis> pairs;  // only pairs with at least one common stage
  MembershipMatrix membership;

  bool operator==(const SimulationReport&) const = default;
};

/// Runs the whole protocol: generate, profile, analyze each unordered
/// pair in population order.
SimulationReport run_simulation(const PopulationSpec& spec, const EnergyCoefficients& coeffs = {},
                                const SimulationOptions& options = {});

}  // namespace pipeprof
