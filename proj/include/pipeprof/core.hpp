#pragma once

// Core domain types for data-sharing pipeline energy profiling: stage
// catalogs, pipelines with per-stage party placement, and per-party
// energy coefficients. All types are immutable after validation and
// safe to share across concurrent readers.

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pipeprof {

inline constexpr std::string_view kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Errors

enum class Errc {
  duplicate_stage_id,
  non_positive_input_volume,
  negative_usage,
  unknown_stage,
  illegal_placement,
  empty_pipeline,
  party_role_mismatch,
  zero_input_volume,
  missing_coefficients,
  invalid_coefficients,
  non_positive_volume,
  provider_mismatch,
  stage_not_in_profile,
  zero_pipeline_energy,
  ratio_out_of_range,
  non_positive_weight,
  non_positive_energy_saving,
  invalid_spec,
  missing_column,
  unexpected_column,
  unparsable_number,
  empty_file,
  parse_error,
  io_failure,
};

std::string_view to_string(Errc code);

/// Exception carrying a machine-checkable error code plus a formatted
/// human-readable message with the offending id/row/field.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

  /// True for filesystem-level failures (CLI exit code 2); everything
  /// else is input validation (exit code 1).
  bool is_io() const noexcept { return code_ == Errc::io_failure; }

 private:
  Errc code_;
};

// ---------------------------------------------------------------------------
// Stage types

enum class StageType { filtering, anonymization, aggregation, converting, custom };

std::string_view to_string(StageType type);

/// Case-insensitive, prefix-tolerant match against the four named
/// categories ("filter" -> filtering, "convert" -> converting).
/// Anything ambiguous or unrecognized maps to custom.
StageType parse_stage_type(std::string_view text);

/// Filtering and anonymization stages tend to be symmetric across
/// consumers and are reuse candidates by default.
bool default_reusable(StageType type);

/// Which stage types qualify for shared execution. Overridable per run.
struct TypeReusePolicy {
  bool filtering = true;
  bool anonymization = true;
  bool aggregation = false;
  bool converting = false;
  bool custom = false;

  bool is_reusable(StageType type) const;

  bool operator==(const TypeReusePolicy&) const = default;
};

// ---------------------------------------------------------------------------
// Stage catalog

/// One catalog entry. Usage units are resource units consumed per GB of
/// stage input; the two volume fields are the measurement reference the
/// stage's transformation factor is derived from.
struct StageRecord {
  std::string stage_id;
  StageType stage_type = StageType::custom;
  double cpu_usage_unit = 0.0;
  double memory_usage_unit = 0.0;
  double input_data_volume = 1.0;   // GB, must be > 0
  double output_data_volume = 1.0;  // GB, >= 0
  double observation_unit = 0.0;

  bool operator==(const StageRecord&) const = default;
};

/// Validated, id-indexed set of stage records. Lookup is a bijection
/// between stage ids and records.
class StageCatalog {
 public:
  StageCatalog() = default;

  const StageRecord& at(std::string_view stage_id) const;  // throws unknown_stage
  const StageRecord* find(std::string_view stage_id) const noexcept;
  bool contains(std::string_view stage_id) const noexcept { return find(stage_id) != nullptr; }

  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const std::vector<StageRecord>& records() const noexcept { return records_; }

  /// Position of a record in catalog order (the order records were
  /// supplied in). Used for canonical stage orderings.
  std::size_t index_of(std::string_view stage_id) const;  // throws unknown_stage

  bool operator==(const StageCatalog& other) const { return records_ == other.records_; }

  friend StageCatalog validate_catalog(std::vector<StageRecord> records);

 private:
  std::vector<StageRecord> records_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Checks per-record invariants and id uniqueness.
/// Errors: duplicate_stage_id, non_positive_input_volume, negative_usage.
StageCatalog validate_catalog(std::vector<StageRecord> records);

// ---------------------------------------------------------------------------
// Parties and pipelines

enum class PartyRole { provider, consumer };

std::string_view to_string(PartyRole role);

struct Party {
  std::string party_id;
  PartyRole role = PartyRole::provider;

  static Party provider(std::string id) { return {std::move(id), PartyRole::provider}; }
  static Party consumer(std::string id) { return {std::move(id), PartyRole::consumer}; }

  bool operator==(const Party&) const = default;
};

/// Which side of the sharing relationship a stage executes on.
enum class Side { provider, consumer };

std::string_view to_string(Side side);

struct PlacedStage {
  std::string stage_id;
  Side placement = Side::provider;

  bool operator==(const PlacedStage&) const = default;
};

/// Ordered stage sequence bound to one provider and one consumer.
/// Placements must form a provider prefix followed by a consumer
/// suffix: data flows one way, owner to consumer.
struct Pipeline {
  std::string pipeline_id;
  Party provider;
  Party consumer;
  std::vector<PlacedStage> stages;
  double source_volume_gb = 1.0;

  std::vector<std::string> stage_ids() const;
  const Party& party(Side side) const { return side == Side::provider ? provider : consumer; }

  bool operator==(const Pipeline&) const = default;
};

/// Checks stage resolvability against the catalog, party roles, and the
/// provider-prefix placement rule. Idempotent: a validated pipeline
/// validates to itself.
/// Errors: empty_pipeline, unknown_stage, illegal_placement,
/// party_role_mismatch, non_positive_volume.
Pipeline validate_pipeline(Pipeline p, const StageCatalog& catalog);

// ---------------------------------------------------------------------------
// Energy coefficients

/// Joules-per-unit conversion factors for one party's infrastructure.
/// Transmission is priced by hop locality; both collapse to a uniform
/// price when set equal.
struct PartyCoefficients {
  double joules_per_cpu_unit = 1.0;
  double joules_per_memory_unit = 1.0;
  double joules_per_gb_transmitted_cross_party = 50.0;
  double joules_per_gb_transmitted_intra_party = 5.0;
  double joules_per_observation_unit = 1.0;

  bool operator==(const PartyCoefficients&) const = default;
};

/// Per-party coefficient map. Parties without an explicit entry inherit
/// the default section; a missing party with no default is an error.
struct EnergyCoefficients {
  std::optional<PartyCoefficients> defaults = PartyCoefficients{};
  std::map<std::string, PartyCoefficients, std::less<>> per_party;

  const PartyCoefficients& for_party(std::string_view party_id) const;  // throws missing_coefficients

  /// All coefficients >= 0 and intra-party transmission <= cross-party.
  void validate() const;  // throws invalid_coefficients

  static EnergyCoefficients uniform(PartyCoefficients c) { return {c, {}}; }

  bool operator==(const EnergyCoefficients&) const = default;
};

}  // namespace pipeprof
