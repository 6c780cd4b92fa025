#pragma once

// File formats and report rendering. Readers are tolerant of quoting,
// surrounding whitespace and comment lines; emitters are byte
// deterministic for identical inputs. The machine report is a
// versioned JSON document that round-trips losslessly; tables carry
// display-rounded values that can always be re-derived from it.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pipeprof/core.hpp"
#include "pipeprof/energy.hpp"
#include "pipeprof/planner.hpp"
#include "pipeprof/reuse.hpp"
#include "pipeprof/simulation.hpp"

namespace pipeprof {

// ---------------------------------------------------------------------------
// Plain file access

/// Whole file as text. Errors: io_failure.
std::string read_text_file(const std::string& path);

/// Writes text, creating parent directories as needed. Errors: io_failure.
void write_text_file(const std::string& path, std::string_view content);

// ---------------------------------------------------------------------------
// Readers

/// Comma-delimited catalog, first row header, UTF-8. Columns must be
/// exactly {stages_id, stages_type, cpu_usage_unit, memory_usage_unit,
/// output_data_volume, input_data_volume, observation_unit}, any
/// order. Fields may be double-quoted and padded with whitespace.
/// Errors: empty_file, missing_column, unexpected_column,
/// unparsable_number (with row and column), plus catalog validation.
StageCatalog parse_catalog_text(std::string_view text, std::string_view source = "<memory>");
StageCatalog parse_catalog_csv(const std::string& path);

/// Semicolon-delimited pipeline records, one per line:
///   id; provider; consumer; 3,4,5[; provider,provider,consumer]
/// '#' starts a comment, blank lines are skipped. The optional fifth
/// field lists per-stage placements (default: all provider).
/// Errors: empty_file, parse_error, plus pipeline validation errors,
/// each carrying the offending line number.
std::vector<Pipeline> parse_pipelines_text(std::string_view text, const StageCatalog& catalog,
                                           std::string_view source = "<memory>");
std::vector<Pipeline> parse_pipelines_file(const std::string& path, const StageCatalog& catalog);

/// Sectioned key-value coefficient file:
///   [default]
///   joules_per_cpu_unit = 2.5
///   [some-party]
///   joules_per_gb_transmitted_cross_party = 80
/// Party sections inherit every key they do not override from the
/// default section (or from built-in defaults when the file has none).
/// Without a [default] section, parties not listed are undefined.
/// Errors: empty_file, parse_error, unparsable_number, plus
/// coefficient validation.
EnergyCoefficients parse_coefficients_text(std::string_view text,
                                           std::string_view source = "<memory>");
EnergyCoefficients parse_coefficients_file(const std::string& path);

/// Flat key-value population spec ('#' comments):
///   pipelines = 100        catalog_size = 11      seed = 42
///   min_len = 2            max_len = 8
///   cpu = 100:1000         memory = 50:500        observation = 10:100
///   input_volume = 1:1     output_volume = 1:1
///   type_mix = filtering:3,anonymization:3,aggregation:3,converting:2
/// An omitted type_mix is split evenly over the named types.
/// Errors: empty_file, parse_error, unparsable_number, invalid_spec.
PopulationSpec parse_population_spec_text(std::string_view text,
                                          std::string_view source = "<memory>");
PopulationSpec parse_population_spec_file(const std::string& path);

// ---------------------------------------------------------------------------
// Display formatting

/// Shortest representation that parses back to the same double.
std::string format_joules(double joules);

/// Ratio as a percentage with one decimal, round-half-even: 0.845 ->
/// "84.5%".
std::string format_percent(double ratio);

/// UTC wall clock as e.g. "2024-05-01T12:00:00Z". Only ever placed in
/// table headers, never in machine output.
std::string iso8601_utc_now();

// ---------------------------------------------------------------------------
// Tables and matrices

/// Per-stage energy and volume table for one pipeline, with category
/// totals and a collapse warning when the volume chain hits zero.
std::string emit_profile_table(const PipelineEnergyProfile& profile);

/// Pairwise common-stage table, columns
///   P_A | P_B | CO | E_CO | E_CO/E_P_A | E_CO/E_P_B
/// P_A/P_B render as the pipelines' stage sequences, CO as the common
/// run; rows sort by descending E_CO, then by pipeline ids. Ratios use
/// format_percent. Empty input renders the header only.
std::string emit_pairwise_table(const std::vector<CommonStageReport>& reports,
                                const std::vector<Pipeline>& pipelines);

/// Stage-by-pipeline 0/1 membership CSV, one row per stage. An empty
/// population renders the header only.
std::string emit_membership_csv(const MembershipMatrix& matrix);

// ---------------------------------------------------------------------------
// Machine reports (JSON, format_version 1)

struct AnalysisEntry {
  CommonStageReport report;
  DominanceResult dominance;

  bool operator==(const AnalysisEntry&) const = default;
};

std::string emit_profiles_json(const std::vector<PipelineEnergyProfile>& profiles);
std::string emit_analysis_json(const std::vector<AnalysisEntry>& entries);
std::string emit_plan_json(const CommonStageReport& report, const DominanceResult& dominance,
                           const PlanSet& plans);

/// Full simulation report. Energy fields carry full precision; the
/// pair entries additionally carry display-rounded strings, which
/// parse_simulation_report ignores.
std::string emit_simulation_report(const SimulationReport& report);

/// Inverse of emit_simulation_report. Errors: parse_error on malformed
/// or version-incompatible documents.
SimulationReport parse_simulation_report(std::string_view json_text);

}  // namespace pipeprof
