#pragma once

// Shared builders for tests. Field values are passed in reading order
// (input before output) rather than struct order to keep call sites
// unambiguous.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pipeprof/core.hpp"
#include "pipeprof/energy.hpp"

namespace testutil {

using namespace pipeprof;

inline StageRecord rec(std::string id, StageType type, double cpu, double mem, double in_vol,
                       double out_vol, double obs) {
  StageRecord r;
  r.stage_id = std::move(id);
  r.stage_type = type;
  r.cpu_usage_unit = cpu;
  r.memory_usage_unit = mem;
  r.input_data_volume = in_vol;
  r.output_data_volume = out_vol;
  r.observation_unit = obs;
  return r;
}

// A stage that neither grows nor shrinks data, for tests that only care
// about sequence structure.
inline StageRecord neutral(std::string id, StageType type = StageType::filtering) {
  return rec(std::move(id), type, 1.0, 1.0, 1.0, 1.0, 1.0);
}

inline StageCatalog catalog_of(std::vector<StageRecord> records) {
  return validate_catalog(std::move(records));
}

inline Pipeline pipe(std::string id, std::vector<std::string> stage_ids,
                     std::string provider = "prov", std::string consumer = "cons",
                     double source_gb = 1.0) {
  Pipeline p;
  p.pipeline_id = std::move(id);
  p.provider = Party::provider(std::move(provider));
  p.consumer = Party::consumer(std::move(consumer));
  p.source_volume_gb = source_gb;
  p.stages.reserve(stage_ids.size());
  for (auto& s : stage_ids) p.stages.push_back(PlacedStage{std::move(s), Side::provider});
  return p;
}

inline EnergyCoefficients unit_coeffs(double cross = 1.0, double intra = 1.0) {
  return EnergyCoefficients::uniform(PartyCoefficients{1.0, 1.0, cross, intra, 1.0});
}

// Error code of the exception `f` throws, or nullopt when it does not
// throw; lets CHECK report a readable mismatch either way.
template <typename F>
inline std::optional<Errc> thrown_code(F&& f) {
  try {
    std::forward<F>(f)();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace testutil
