#include "pipeprof/core.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include <fmt/format.h>

namespace pipeprof {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::duplicate_stage_id: return "duplicate_stage_id";
    case Errc::non_positive_input_volume: return "non_positive_input_volume";
    case Errc::negative_usage: return "negative_usage";
    case Errc::unknown_stage: return "unknown_stage";
    case Errc::illegal_placement: return "illegal_placement";
    case Errc::empty_pipeline: return "empty_pipeline";
    case Errc::party_role_mismatch: return "party_role_mismatch";
    case Errc::zero_input_volume: return "zero_input_volume";
    case Errc::missing_coefficients: return "missing_coefficients";
    case Errc::invalid_coefficients: return "invalid_coefficients";
    case Errc::non_positive_volume: return "non_positive_volume";
    case Errc::provider_mismatch: return "provider_mismatch";
    case Errc::stage_not_in_profile: return "stage_not_in_profile";
    case Errc::zero_pipeline_energy: return "zero_pipeline_energy";
    case Errc::ratio_out_of_range: return "ratio_out_of_range";
    case Errc::non_positive_weight: return "non_positive_weight";
    case Errc::non_positive_energy_saving: return "non_positive_energy_saving";
    case Errc::invalid_spec: return "invalid_spec";
    case Errc::missing_column: return "missing_column";
    case Errc::unexpected_column: return "unexpected_column";
    case Errc::unparsable_number: return "unparsable_number";
    case Errc::empty_file: return "empty_file";
    case Errc::parse_error: return "parse_error";
    case Errc::io_failure: return "io_failure";
  }
  return "unknown_error";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(fmt::format("{}: {}", to_string(code), message)), code_(code) {}

std::string_view to_string(StageType type) {
  switch (type) {
    case StageType::filtering: return "filtering";
    case StageType::anonymization: return "anonymization";
    case StageType::aggregation: return "aggregation";
    case StageType::converting: return "converting";
    case StageType::custom: return "custom";
  }
  return "custom";
}

namespace {

std::string lowercase_trimmed(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  std::string out;
  out.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i]))));
  }
  return out;
}

}  // namespace

StageType parse_stage_type(std::string_view text) {
  static constexpr std::array<std::pair<std::string_view, StageType>, 4> kNamed = {{
      {"filtering", StageType::filtering},
      {"anonymization", StageType::anonymization},
      {"aggregation", StageType::aggregation},
      {"converting", StageType::converting},
  }};
  const std::string needle = lowercase_trimmed(text);
  if (needle.empty()) return StageType::custom;

  StageType matched = StageType::custom;
  int candidates = 0;
  for (const auto& [name, type] : kNamed) {
    const bool prefix_of_name = name.size() >= needle.size() && name.substr(0, needle.size()) == needle;
    const bool name_is_prefix = needle.size() >= name.size() && std::string_view(needle).substr(0, name.size()) == name;
    if (prefix_of_name || name_is_prefix) {
      matched = type;
      ++candidates;
    }
  }
  return candidates == 1 ? matched : StageType::custom;
}

bool default_reusable(StageType type) {
  return type == StageType::filtering || type == StageType::anonymization;
}

bool TypeReusePolicy::is_reusable(StageType type) const {
  switch (type) {
    case StageType::filtering: return filtering;
    case StageType::anonymization: return anonymization;
    case StageType::aggregation: return aggregation;
    case StageType::converting: return converting;
    case StageType::custom: return custom;
  }
  return false;
}

const StageRecord& StageCatalog::at(std::string_view stage_id) const {
  const StageRecord* record = find(stage_id);
  if (record == nullptr) {
    throw Error(Errc::unknown_stage, fmt::format("stage '{}' is not in the catalog", stage_id));
  }
  return *record;
}

const StageRecord* StageCatalog::find(std::string_view stage_id) const noexcept {
  auto it = index_.find(stage_id);
  return it == index_.end() ? nullptr : &records_[it->second];
}

std::size_t StageCatalog::index_of(std::string_view stage_id) const {
  auto it = index_.find(stage_id);
  if (it == index_.end()) {
    throw Error(Errc::unknown_stage, fmt::format("stage '{}' is not in the catalog", stage_id));
  }
  return it->second;
}

StageCatalog validate_catalog(std::vector<StageRecord> records) {
  StageCatalog catalog;
  catalog.index_.clear();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const StageRecord& record = records[i];
    auto [it, inserted] = catalog.index_.emplace(record.stage_id, i);
    if (!inserted) {
      throw Error(Errc::duplicate_stage_id, fmt::format("stage id '{}' appears more than once", record.stage_id));
    }
    if (!(record.input_data_volume > 0.0)) {
      throw Error(Errc::non_positive_input_volume,
                  fmt::format("stage '{}' has input_data_volume {}", record.stage_id, record.input_data_volume));
    }
    const std::array<std::pair<std::string_view, double>, 4> usage = {{
        {"cpu_usage_unit", record.cpu_usage_unit},
        {"memory_usage_unit", record.memory_usage_unit},
        {"output_data_volume", record.output_data_volume},
        {"observation_unit", record.observation_unit},
    }};
    for (const auto& [field, value] : usage) {
      if (value < 0.0) {
        throw Error(Errc::negative_usage, fmt::format("stage '{}' field {} is negative ({})", record.stage_id, field, value));
      }
    }
  }
  catalog.records_ = std::move(records);
  return catalog;
}

std::string_view to_string(PartyRole role) {
  return role == PartyRole::provider ? "provider" : "consumer";
}

std::string_view to_string(Side side) {
  return side == Side::provider ? "provider" : "consumer";
}

std::vector<std::string> Pipeline::stage_ids() const {
  std::vector<std::string> ids;
  ids.reserve(stages.size());
  for (const PlacedStage& stage : stages) ids.push_back(stage.stage_id);
  return ids;
}

Pipeline validate_pipeline(Pipeline p, const StageCatalog& catalog) {
  if (p.stages.empty()) {
    throw Error(Errc::empty_pipeline, fmt::format("pipeline '{}' has no stages", p.pipeline_id));
  }
  if (p.provider.role != PartyRole::provider) {
    throw Error(Errc::party_role_mismatch,
                fmt::format("pipeline '{}': party '{}' bound as provider has role {}", p.pipeline_id,
                            p.provider.party_id, to_string(p.provider.role)));
  }
  if (p.consumer.role != PartyRole::consumer) {
    throw Error(Errc::party_role_mismatch,
                fmt::format("pipeline '{}': party '{}' bound as consumer has role {}", p.pipeline_id,
                            p.consumer.party_id, to_string(p.consumer.role)));
  }
  if (!(p.source_volume_gb > 0.0)) {
    throw Error(Errc::non_positive_volume,
                fmt::format("pipeline '{}' has source volume {} GB", p.pipeline_id, p.source_volume_gb));
  }
  bool seen_consumer = false;
  for (std::size_t i = 0; i < p.stages.size(); ++i) {
    const PlacedStage& stage = p.stages[i];
    if (!catalog.contains(stage.stage_id)) {
      throw Error(Errc::unknown_stage,
                  fmt::format("pipeline '{}' stage {} references unknown stage '{}'", p.pipeline_id, i, stage.stage_id));
    }
    if (stage.placement == Side::consumer) {
      seen_consumer = true;
    } else if (seen_consumer) {
      // once data crosses to the consumer it never comes back
      throw Error(Errc::illegal_placement,
                  fmt::format("pipeline '{}': provider-placed stage at position {} follows a consumer-placed one",
                              p.pipeline_id, i));
    }
  }
  return p;
}

const PartyCoefficients& EnergyCoefficients::for_party(std::string_view party_id) const {
  auto it = per_party.find(party_id);
  if (it != per_party.end()) return it->second;
  if (defaults.has_value()) return *defaults;
  throw Error(Errc::missing_coefficients,
              fmt::format("no coefficients for party '{}' and no default section", party_id));
}

namespace {

void validate_party_coefficients(std::string_view label, const PartyCoefficients& c) {
  const std::array<std::pair<std::string_view, double>, 5> fields = {{
      {"joules_per_cpu_unit", c.joules_per_cpu_unit},
      {"joules_per_memory_unit", c.joules_per_memory_unit},
      {"joules_per_gb_transmitted_cross_party", c.joules_per_gb_transmitted_cross_party},
      {"joules_per_gb_transmitted_intra_party", c.joules_per_gb_transmitted_intra_party},
      {"joules_per_observation_unit", c.joules_per_observation_unit},
  }};
  for (const auto& [field, value] : fields) {
    if (value < 0.0) {
      throw Error(Errc::invalid_coefficients, fmt::format("[{}] {} is negative ({})", label, field, value));
    }
  }
  if (c.joules_per_gb_transmitted_intra_party > c.joules_per_gb_transmitted_cross_party) {
    throw Error(Errc::invalid_coefficients,
                fmt::format("[{}] intra-party transmission ({}) exceeds cross-party ({})", label,
                            c.joules_per_gb_transmitted_intra_party, c.joules_per_gb_transmitted_cross_party));
  }
}

}  // namespace

void EnergyCoefficients::validate() const {
  if (defaults.has_value()) validate_party_coefficients("default", *defaults);
  for (const auto& [party_id, c] : per_party) validate_party_coefficients(party_id, c);
}

}  // namespace pipeprof
