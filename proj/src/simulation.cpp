#include "pipeprof/simulation.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <bit>
#include <numeric>
#include <utility>

namespace pipeprof {

namespace {

// splitmix64; short, well mixed, and trivially portable. Used only to
// spread one user seed into independent engine seeds.
std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_stream_seed(std::uint64_t root, std::uint64_t stream) {
  std::uint64_t state = root;
  std::uint64_t out = splitmix64_next(state);
  for (std::uint64_t i = 0; i < stream; ++i) out = splitmix64_next(state);
  return out;
}

double uniform_double(std::mt19937_64& rng, double min, double max) {
  if (min == max) return min;
  // Top 53 bits give the usual dyadic uniform in [0, 1).
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return min + unit * (max - min);
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t mask = std::bit_ceil(n) - 1;
  for (;;) {
    const std::uint64_t v = rng() & mask;
    if (v < n) return v;
  }
}

TypeMix TypeMix::for_size(std::size_t catalog_size) {
  TypeMix mix;
  const std::size_t base = catalog_size / 4;
  const std::size_t rem = catalog_size % 4;
  mix.filtering = base + (rem > 0 ? 1 : 0);
  mix.anonymization = base + (rem > 1 ? 1 : 0);
  mix.aggregation = base + (rem > 2 ? 1 : 0);
  mix.converting = base;
  mix.custom = 0;
  return mix;
}

void validate_spec(const PopulationSpec& spec) {
  const auto fail = [](std::string msg) { throw Error(Errc::invalid_spec, std::move(msg)); };
  if (spec.n_pipelines < 1) fail("population needs at least one pipeline");
  if (spec.catalog_size < 1) fail("catalog cannot be empty");
  if (spec.min_len < 1 || spec.min_len > spec.max_len || spec.max_len > spec.catalog_size) {
    fail(fmt::format(
        "pipeline length bounds [{}, {}] must satisfy 1 <= min <= max <= catalog size {}",
        spec.min_len, spec.max_len, spec.catalog_size));
  }
  if (spec.type_mix.total() != spec.catalog_size) {
    fail(fmt::format("type mix sums to {} but the catalog holds {} stages", spec.type_mix.total(),
                     spec.catalog_size));
  }
  if (spec.catalog_size >= 4 &&
      (spec.type_mix.filtering == 0 || spec.type_mix.anonymization == 0 ||
       spec.type_mix.aggregation == 0 || spec.type_mix.converting == 0)) {
    fail("catalogs of four or more stages need every named type present");
  }
  const auto check_range = [&](const ValueRange& r, std::string_view name, bool positive_min) {
    if (!(r.min <= r.max)) fail(fmt::format("{} range [{}, {}] is inverted", name, r.min, r.max));
    if (positive_min ? !(r.min > 0.0) : r.min < 0.0) {
      fail(fmt::format("{} range minimum {} is out of bounds", name, r.min));
    }
  };
  check_range(spec.usage_ranges.cpu, "cpu", false);
  check_range(spec.usage_ranges.memory, "memory", false);
  check_range(spec.usage_ranges.input_volume, "input volume", true);
  check_range(spec.usage_ranges.output_volume, "output volume", false);
  check_range(spec.usage_ranges.observation, "observation", false);
}

StageCatalog generate_catalog(const PopulationSpec& spec) {
  validate_spec(spec);
  std::mt19937_64 rng(derive_stream_seed(spec.seed, 1));

  std::vector<StageType> types;
  types.reserve(spec.catalog_size);
  const auto fill = [&](StageType t, std::size_t count) { types.insert(types.end(), count, t); };
  fill(StageType::filtering, spec.type_mix.filtering);
  fill(StageType::anonymization, spec.type_mix.anonymization);
  fill(StageType::aggregation, spec.type_mix.aggregation);
  fill(StageType::converting, spec.type_mix.converting);
  fill(StageType::custom, spec.type_mix.custom);
  // Explicit Fisher-Yates so the draw sequence is pinned down.
  for (std::size_t i = types.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(types[i - 1], types[j]);
  }

  const UsageRanges& ranges = spec.usage_ranges;
  std::vector<StageRecord> records;
  records.reserve(spec.catalog_size);
  for (std::size_t i = 0; i < spec.catalog_size; ++i) {
    StageRecord r;
    r.stage_id = fmt::format("{}", i + 1);
    r.stage_type = types[i];
    // Field draw order is part of the protocol; reordering would shift
    // every later sample.
    r.cpu_usage_unit = uniform_double(rng, ranges.cpu.min, ranges.cpu.max);
    r.memory_usage_unit = uniform_double(rng, ranges.memory.min, ranges.memory.max);
    r.input_data_volume = uniform_double(rng, ranges.input_volume.min, ranges.input_volume.max);
    r.output_data_volume = uniform_double(rng, ranges.output_volume.min, ranges.output_volume.max);
    r.observation_unit = uniform_double(rng, ranges.observation.min, ranges.observation.max);
    records.push_back(std::move(r));
  }
  return validate_catalog(std::move(records));
}

std::vector<Pipeline> populate_pipelines(const PopulationSpec& spec, const StageCatalog& catalog) {
  validate_spec(spec);
  if (spec.max_len > catalog.size()) {
    throw Error(Errc::invalid_spec,
                fmt::format("maximum pipeline length {} exceeds the catalog's {} stages",
                            spec.max_len, catalog.size()));
  }
  std::mt19937_64 rng(derive_stream_seed(spec.seed, 2));
  const int width =
      std::max<int>(3, static_cast<int>(fmt::format("{}", spec.n_pipelines).size()));

  std::vector<Pipeline> out;
  out.reserve(spec.n_pipelines);
  std::vector<std::size_t> pool(catalog.size());
  for (std::size_t i = 0; i < spec.n_pipelines; ++i) {
    const std::size_t len =
        spec.min_len +
        static_cast<std::size_t>(uniform_below(rng, spec.max_len - spec.min_len + 1));
    // Partial Fisher-Yates: distinct stages, then catalog order. A
    // pipeline is a walk down the catalog, never a revisit.
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t k = 0; k < len; ++k) {
      const std::size_t j =
          k + static_cast<std::size_t>(uniform_below(rng, pool.size() - k));
      std::swap(pool[k], pool[j]);
    }
    std::vector<std::size_t> picks(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(len));
    std::sort(picks.begin(), picks.end());

    Pipeline p;
    p.pipeline_id = fmt::format("p{:0{}}", i + 1, width);
    p.provider = Party::provider("provider");
    p.consumer = Party::consumer(fmt::format("c{:0{}}", i + 1, width));
    p.source_volume_gb = 1.0;
    p.stages.reserve(len);
    for (const std::size_t idx : picks) {
      p.stages.push_back(PlacedStage{catalog.records()[idx].stage_id, Side::provider});
    }
    out.push_back(validate_pipeline(std::move(p), catalog));
  }
  return out;
}

MembershipMatrix build_membership(const StageCatalog& catalog,
                                  const std::vector<Pipeline>& pipelines) {
  MembershipMatrix m;
  m.stage_ids.reserve(catalog.size());
  for (const StageRecord& r : catalog.records()) m.stage_ids.push_back(r.stage_id);
  m.pipeline_ids.reserve(pipelines.size());
  for (const Pipeline& p : pipelines) m.pipeline_ids.push_back(p.pipeline_id);
  m.cells.assign(catalog.size(), std::vector<std::uint8_t>(pipelines.size(), 0));
  for (std::size_t pi = 0; pi < pipelines.size(); ++pi) {
    for (const PlacedStage& s : pipelines[pi].stages) {
      m.cells[catalog.index_of(s.stage_id)][pi] = 1;
    }
  }
  return m;
}

SimulationReport run_simulation(const PopulationSpec& spec, const EnergyCoefficients& coeffs,
                                const SimulationOptions& options) {
  validate_spec(spec);
  coeffs.validate();

  SimulationReport report;
  report.spec = spec;
  report.coefficients = coeffs;
  report.catalog = generate_catalog(spec);
  report.pipelines = populate_pipelines(spec, report.catalog);

  report.profiles.reserve(report.pipelines.size());
  for (const Pipeline& p : report.pipelines) {
    report.profiles.push_back(pipeline_energy(p, report.catalog, coeffs, options.planner.epsilon));
  }

  for (std::size_t i = 0; i < report.pipelines.size(); ++i) {
    for (std::size_t j = i + 1; j < report.pipelines.size(); ++j) {
      const Pipeline& a = report.pipelines[i];
      const Pipeline& b = report.pipelines[j];
      const auto common =
          common_stages(a, b, options.report_policy, report.catalog, options.planner.reuse);
      if (common.empty()) continue;
      PairAnalysis pair;
      pair.report = build_common_report(a, b, report.profiles[i], report.profiles[j],
                                        options.report_policy, report.catalog,
                                        options.planner.reuse);
      pair.dominance = dominance_check(report.profiles[i], report.profiles[j], pair.report.common,
                                       options.dominance_factor);
      PlanSet plans = recommend(a, b, report.catalog, coeffs, options.weights, options.planner);
      pair.best_plan = std::move(plans.plans.front());
      pair.no_reuse_recommended = plans.no_reuse_recommended;
      report.pairs.push_back(std::move(pair));
    }
  }
  report.membership = build_membership(report.catalog, report.pipelines);
  return report;
}

}  // namespace pipeprof
