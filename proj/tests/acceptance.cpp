// Acceptance gate: one release criterion per check, one output line per
// criterion. Checks use independent re-computations (plain loops and
// brute-force scans) rather than the library's own aggregation paths.
// argv[1] is the command-line binary, exercised end to end by the
// determinism check.

#include <fmt/core.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <initializer_list>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "helpers.hpp"
#include "pipeprof/io.hpp"
#include "pipeprof/planner.hpp"
#include "pipeprof/reuse.hpp"
#include "pipeprof/simulation.hpp"

using namespace pipeprof;

namespace {

int g_failures = 0;

using Outcome = std::pair<bool, std::string>;

Outcome pass(std::string detail = {}) { return {true, std::move(detail)}; }
Outcome fail(std::string detail) { return {false, std::move(detail)}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double real(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
  }
  std::size_t below(std::size_t n) { return n ? static_cast<std::size_t>(gen() % n) : 0; }
};

StageCatalog random_catalog(Rng& rng, std::size_t n, bool allow_zero_output) {
  std::vector<StageRecord> records;
  records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    StageRecord r;
    r.stage_id = fmt::format("s{}", i + 1);
    r.stage_type = static_cast<StageType>(rng.below(5));
    r.cpu_usage_unit = rng.real(0.0, 1000.0);
    r.memory_usage_unit = rng.real(0.0, 500.0);
    r.input_data_volume = rng.real(0.05, 5.0);
    r.output_data_volume =
        allow_zero_output && rng.below(10) == 0 ? 0.0 : rng.real(0.01, 5.0);
    r.observation_unit = rng.real(0.0, 100.0);
    records.push_back(std::move(r));
  }
  return validate_catalog(std::move(records));
}

Pipeline random_pipeline(Rng& rng, const StageCatalog& catalog, std::string id,
                         std::string provider, std::string consumer, std::size_t max_len = 6) {
  const std::size_t len = 1 + rng.below(max_len);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < len; ++i) {
    ids.push_back(catalog.records()[rng.below(catalog.size())].stage_id);
  }
  Pipeline p = testutil::pipe(std::move(id), std::move(ids), std::move(provider),
                              std::move(consumer), rng.real(0.1, 4.0));
  const std::size_t split = rng.below(len + 1);
  for (std::size_t i = split; i < len; ++i) p.stages[i].placement = Side::consumer;
  return p;
}

PartyCoefficients random_party_coeffs(Rng& rng) {
  PartyCoefficients c;
  c.joules_per_cpu_unit = rng.real(0.0, 5.0);
  c.joules_per_memory_unit = rng.real(0.0, 5.0);
  c.joules_per_gb_transmitted_intra_party = rng.real(0.0, 10.0);
  c.joules_per_gb_transmitted_cross_party =
      c.joules_per_gb_transmitted_intra_party + rng.real(0.0, 40.0);
  c.joules_per_observation_unit = rng.real(0.0, 5.0);
  return c;
}

EnergyCoefficients random_coeffs(Rng& rng, std::initializer_list<std::string> parties) {
  EnergyCoefficients coeffs;
  coeffs.defaults = random_party_coeffs(rng);
  for (const std::string& p : parties) coeffs.per_party[p] = random_party_coeffs(rng);
  coeffs.validate();
  return coeffs;
}

// --------------------------------------------------------------------------
// 1. The three energy categories sum to the reported total.

Outcome criterion_profile_additivity() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(101);
  double worst = 0.0;
  std::size_t profiles = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const StageCatalog catalog = random_catalog(rng, 1 + rng.below(6), true);
    const Pipeline p = random_pipeline(rng, catalog, "p", "prov", "cons");
    const EnergyCoefficients coeffs = random_coeffs(rng, {"prov", "cons"});
    const PipelineEnergyProfile profile = pipeline_energy(p, catalog, coeffs);

    double operational = 0.0;
    double transmission = 0.0;
    double observation = 0.0;
    for (const StageProfile& s : profile.stages) {
      operational += s.energy.cpu_j + s.energy.memory_j;
      transmission += s.energy.transmission_j;
      observation += s.energy.observation_j;
    }
    const double scale = std::max(1.0, std::fabs(profile.total_j));
    worst = std::max(worst,
                     std::fabs(profile.total_j - (operational + transmission + observation)) / scale);
    worst = std::max(worst, std::fabs(profile.operational_j() - operational) / scale);
    worst = std::max(worst, std::fabs(profile.transmission_j - transmission) / scale);
    worst = std::max(worst, std::fabs(profile.observation_j - observation) / scale);
    ++profiles;
  }
  const double elapsed = seconds_since(t0);
  if (worst > 1e-9) return fail(fmt::format("worst relative gap {}", worst));
  if (elapsed >= 5.0) return fail(fmt::format("{} profiles took {:.2f}s", profiles, elapsed));
  return pass(fmt::format("{} profiles, worst gap {:.1e}, {:.2f}s", profiles, worst, elapsed));
}

// --------------------------------------------------------------------------
// 2. Volumes chain stage to stage by each stage's transformation factor.

Outcome criterion_volume_chain() {
  Rng rng(202);
  const double factor_pool[] = {0.0, 0.25, 0.5, 0.9895, 1.0, 1.005, 1.0105, 2.0, 3.0};
  double worst = 0.0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t len = 1 + rng.below(10);
    std::vector<StageRecord> records;
    std::vector<double> factors;
    for (std::size_t i = 0; i < len; ++i) {
      const double f = factor_pool[rng.below(std::size(factor_pool))];
      StageRecord r;
      r.stage_id = fmt::format("s{}", i + 1);
      r.stage_type = StageType::custom;
      r.input_data_volume = rng.real(0.1, 4.0);
      r.output_data_volume = f * r.input_data_volume;
      records.push_back(r);
      factors.push_back(r.output_data_volume / r.input_data_volume);
    }
    const StageCatalog catalog = validate_catalog(records);
    std::vector<std::string> ids;
    for (const StageRecord& r : records) ids.push_back(r.stage_id);
    const double source = rng.real(0.1, 8.0);
    const Pipeline p = testutil::pipe("p", ids, "prov", "cons", source);

    const VolumeChain chain = propagate_volumes(p, catalog);
    if (chain.stages.size() != len) return fail("chain length mismatch");

    double expected_in = source;
    std::optional<std::size_t> expected_collapse;
    for (std::size_t i = 0; i < len; ++i) {
      const double expected_out = factors[i] * expected_in;
      const double scale = std::max(1.0, expected_in);
      worst = std::max(worst, std::fabs(chain.stages[i].input_gb - expected_in) / scale);
      worst = std::max(worst, std::fabs(chain.stages[i].output_gb - expected_out) / scale);

      const TfClass expected_class = std::fabs(factors[i] - 1.0) <= 0.01
                                         ? TfClass::preservation
                                         : (factors[i] < 1.0 ? TfClass::compression
                                                             : TfClass::expansion);
      if (chain.stages[i].tf_class != expected_class) {
        return fail(fmt::format("stage {} classified {} for factor {}", i,
                                to_string(chain.stages[i].tf_class), factors[i]));
      }
      if (expected_out == 0.0 && !expected_collapse && i + 1 < len) expected_collapse = i;
      expected_in = expected_out;
    }
    if (chain.collapse_at != expected_collapse) {
      return fail(fmt::format("collapse index mismatch on trial {}", trial));
    }
  }
  if (worst > 1e-9) return fail(fmt::format("worst relative gap {}", worst));
  return pass(fmt::format("400 chains up to 10 stages, worst gap {:.1e}", worst));
}

// --------------------------------------------------------------------------
// 3. Energy is linear in the source volume.

Outcome criterion_linearity() {
  Rng rng(303);
  double worst = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const StageCatalog catalog = random_catalog(rng, 1 + rng.below(6), false);
    const Pipeline base = random_pipeline(rng, catalog, "p", "prov", "cons");
    const EnergyCoefficients coeffs = random_coeffs(rng, {"prov", "cons"});
    const PipelineEnergyProfile at_base = pipeline_energy(base, catalog, coeffs);

    for (const double c : {0.5, 2.0, 10.0}) {
      Pipeline scaled_pipeline = base;
      scaled_pipeline.source_volume_gb = c * base.source_volume_gb;
      const PipelineEnergyProfile direct = pipeline_energy(scaled_pipeline, catalog, coeffs);
      const PipelineEnergyProfile rescaled = scale_profile(at_base, c * base.source_volume_gb);

      const auto gap = [](double x, double y) {
        return std::fabs(x - y) / std::max(1.0, std::fabs(x));
      };
      worst = std::max(worst, gap(direct.total_j, c * at_base.total_j));
      worst = std::max(worst, gap(direct.total_j, rescaled.total_j));
      worst = std::max(worst, gap(direct.transmission_j, c * at_base.transmission_j));
      worst = std::max(worst, gap(direct.observation_j, c * at_base.observation_j));
      worst = std::max(worst, gap(direct.operational_j(), c * at_base.operational_j()));
    }
  }
  if (worst > 1e-9) return fail(fmt::format("worst relative gap {}", worst));
  return pass(fmt::format("300 pipelines x {{0.5, 2, 10}}, worst gap {:.1e}", worst));
}

// --------------------------------------------------------------------------
// 4. Common-stage detection agrees with brute-force scans.

std::vector<std::string> oracle_contiguous(const std::vector<std::string>& a,
                                           const std::vector<std::string>& b) {
  std::size_t best_len = 0;
  std::size_t best_a = 0;
  for (std::size_t ia = 0; ia < a.size(); ++ia) {
    for (std::size_t ib = 0; ib < b.size(); ++ib) {
      std::size_t k = 0;
      while (ia + k < a.size() && ib + k < b.size() && a[ia + k] == b[ib + k]) ++k;
      if (k > best_len) {
        best_len = k;
        best_a = ia;
      }
    }
  }
  return {a.begin() + static_cast<std::ptrdiff_t>(best_a),
          a.begin() + static_cast<std::ptrdiff_t>(best_a + best_len)};
}

std::vector<std::string> oracle_prefix(const std::vector<std::string>& a,
                                       const std::vector<std::string>& b,
                                       const StageCatalog& catalog) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] != b[i] || !default_reusable(catalog.at(a[i]).stage_type)) break;
    out.push_back(a[i]);
  }
  return out;
}

Outcome criterion_common_stages() {
  Rng rng(404);
  std::size_t trials = 0;
  for (std::size_t catalog_size = 4; catalog_size <= 8; ++catalog_size) {
    const StageCatalog catalog = random_catalog(rng, catalog_size, false);
    for (int t = 0; t < 300; ++t) {
      const Pipeline a = random_pipeline(rng, catalog, "a", "prov", "ca");
      const Pipeline b = random_pipeline(rng, catalog, "b", "prov", "cb");
      const auto ids_a = a.stage_ids();
      const auto ids_b = b.stage_ids();

      const auto got_sub = common_stages(a, b, DetectionPolicy::contiguous_subsequence, catalog);
      if (got_sub != oracle_contiguous(ids_a, ids_b)) {
        return fail(fmt::format("subsequence mismatch for [{}] vs [{}]", fmt::join(ids_a, ","),
                                fmt::join(ids_b, ",")));
      }
      const auto got_prefix = common_stages(a, b, DetectionPolicy::strict_prefix, catalog);
      if (got_prefix != oracle_prefix(ids_a, ids_b, catalog)) {
        return fail(fmt::format("prefix mismatch for [{}] vs [{}]", fmt::join(ids_a, ","),
                                fmt::join(ids_b, ",")));
      }
      ++trials;
    }
  }

  // frozen sequence pairs
  std::vector<StageRecord> numbered;
  for (int i = 1; i <= 10; ++i) numbered.push_back(testutil::neutral(std::to_string(i)));
  const StageCatalog numeric = validate_catalog(std::move(numbered));
  const auto run = [&](std::vector<std::string> sa, std::vector<std::string> sb) {
    return common_stages(testutil::pipe("a", std::move(sa), "prov", "ca"),
                         testutil::pipe("b", std::move(sb), "prov", "cb"),
                         DetectionPolicy::contiguous_subsequence, numeric);
  };
  if (run({"2", "3", "5", "6", "9", "10"}, {"2", "3", "5", "6", "7", "9"}) !=
      std::vector<std::string>{"2", "3", "5", "6"}) {
    return fail("frozen pair 1 mismatch");
  }
  if (run({"4", "5", "6", "8", "10"}, {"3", "4", "5"}) != std::vector<std::string>{"4", "5"}) {
    return fail("frozen pair 2 mismatch");
  }
  return pass(fmt::format("{} random pairs over catalogs of 4..8 plus frozen pairs", trials));
}

// --------------------------------------------------------------------------
// 5. Shared-energy ratios stay inside [0, 1] across simulated populations.

Outcome criterion_ratio_bounds() {
  std::size_t pairs = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    PopulationSpec spec;
    spec.seed = seed;
    spec.n_pipelines = 20;
    const SimulationReport report = run_simulation(spec);
    for (const PairAnalysis& pair : report.pairs) {
      const auto bad = [&](double r) { return !(r >= 0.0) || !(r <= 1.0); };
      if (bad(pair.report.ratio_a) || bad(pair.report.ratio_b)) {
        return fail(fmt::format("seed {} pair {}+{} ratios {} / {}", seed, pair.report.pipeline_a,
                                pair.report.pipeline_b, pair.report.ratio_a, pair.report.ratio_b));
      }
      ++pairs;
    }
  }
  if (pairs == 0) return fail("no pairs with common stages were produced");
  return pass(fmt::format("{} pair reports over 20 seeds", pairs));
}

// --------------------------------------------------------------------------
// 6. Configuration estimates agree with an explicit per-hop walk, and the
//    degenerate configuration equals the independent baseline.

double oracle_estimate(const ExecutionConfiguration& config, const Pipeline& a, const Pipeline& b,
                       const StageCatalog& catalog, const EnergyCoefficients& coeffs) {
  const std::string& prov = a.provider.party_id;
  double total = 0.0;
  double volume = a.source_volume_gb;
  for (std::size_t i = 0; i < config.shared_stages.size(); ++i) {
    const StageRecord& r = catalog.at(config.shared_stages[i]);
    const PartyCoefficients& pc = coeffs.for_party(prov);
    const double out = (r.output_data_volume / r.input_data_volume) * volume;
    total += r.cpu_usage_unit * volume * pc.joules_per_cpu_unit;
    total += r.memory_usage_unit * volume * pc.joules_per_memory_unit;
    total += r.observation_unit * volume * pc.joules_per_observation_unit;
    if (i + 1 < config.shared_stages.size()) {
      total += out * pc.joules_per_gb_transmitted_intra_party;
    }
    volume = out;
  }

  const Pipeline* pipelines[2] = {&a, &b};
  for (std::size_t bi = 0; bi < 2; ++bi) {
    const BranchPlan& branch = config.branches[bi];
    const Pipeline& p = *pipelines[bi];
    double v = config.shared_stages.empty() ? p.source_volume_gb : volume;
    if (!config.shared_stages.empty()) {
      const PartyCoefficients& pc = coeffs.for_party(prov);
      const bool to_consumer = branch.stages.empty() || branch.consumer_offload_from == 0;
      total += v * (to_consumer ? pc.joules_per_gb_transmitted_cross_party
                                : pc.joules_per_gb_transmitted_intra_party);
    }
    for (std::size_t j = 0; j < branch.stages.size(); ++j) {
      const StageRecord& r = catalog.at(branch.stages[j]);
      const bool at_consumer = j >= branch.consumer_offload_from;
      const PartyCoefficients& pc =
          coeffs.for_party(at_consumer ? p.consumer.party_id : prov);
      const double out = (r.output_data_volume / r.input_data_volume) * v;
      total += r.cpu_usage_unit * v * pc.joules_per_cpu_unit;
      total += r.memory_usage_unit * v * pc.joules_per_memory_unit;
      total += r.observation_unit * v * pc.joules_per_observation_unit;
      const bool next_at_consumer =
          j + 1 < branch.stages.size() ? j + 1 >= branch.consumer_offload_from : true;
      total += out * (next_at_consumer == at_consumer
                          ? pc.joules_per_gb_transmitted_intra_party
                          : pc.joules_per_gb_transmitted_cross_party);
      v = out;
    }
  }
  return total;
}

Outcome criterion_configuration_estimates() {
  Rng rng(606);
  std::size_t configs_checked = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 150; ++trial) {
    // reusable prefix pool + disjoint unique suffix pools
    std::vector<StageRecord> records;
    for (int i = 0; i < 4; ++i) {
      StageRecord r = random_catalog(rng, 1, false).records()[0];
      r.stage_id = fmt::format("f{}", i + 1);
      r.stage_type = rng.below(2) == 0 ? StageType::filtering : StageType::anonymization;
      records.push_back(r);
    }
    for (int i = 0; i < 3; ++i) {
      StageRecord r = random_catalog(rng, 1, false).records()[0];
      r.stage_id = fmt::format("ua{}", i + 1);
      records.push_back(r);
      r.stage_id = fmt::format("ub{}", i + 1);
      r.cpu_usage_unit = rng.real(0.0, 800.0);
      records.push_back(r);
    }
    const StageCatalog catalog = validate_catalog(std::move(records));

    const std::size_t shared = rng.below(5);       // 0..4
    const std::size_t tail_a = rng.below(4);       // 0..3
    const std::size_t tail_b = rng.below(4);
    if (shared + tail_a == 0 || shared + tail_b == 0) continue;
    std::vector<std::string> ids_a;
    std::vector<std::string> ids_b;
    for (std::size_t i = 0; i < shared; ++i) {
      ids_a.push_back(fmt::format("f{}", i + 1));
      ids_b.push_back(fmt::format("f{}", i + 1));
    }
    for (std::size_t i = 0; i < tail_a; ++i) ids_a.push_back(fmt::format("ua{}", i + 1));
    for (std::size_t i = 0; i < tail_b; ++i) ids_b.push_back(fmt::format("ub{}", i + 1));

    const Pipeline a =
        testutil::pipe("a", ids_a, "prov", "cons-a", rng.real(0.2, 3.0));
    const Pipeline b =
        testutil::pipe("b", ids_b, "prov", "cons-b", rng.real(0.2, 3.0));
    const EnergyCoefficients coeffs = random_coeffs(rng, {"prov", "cons-a", "cons-b"});

    const auto configs = enumerate_configurations(a, b, catalog, coeffs);
    const double baseline = pipeline_energy(a, catalog, coeffs).total_j +
                            pipeline_energy(b, catalog, coeffs).total_j;
    for (const ExecutionConfiguration& c : configs) {
      const double expected = oracle_estimate(c, a, b, catalog, coeffs);
      const double scale = std::max(1.0, std::fabs(expected));
      worst = std::max(worst, std::fabs(c.estimated_j - expected) / scale);
      if (c.config_id == "cfg_l0_a0_b0") {
        worst = std::max(worst, std::fabs(c.estimated_j - baseline) / scale);
      }
      if (c.baseline_j != baseline &&
          std::fabs(c.baseline_j - baseline) / std::max(1.0, baseline) > 1e-9) {
        return fail("stored baseline differs from the independent profiles");
      }
      ++configs_checked;
    }
  }
  if (worst > 1e-9) return fail(fmt::format("worst relative gap {}", worst));
  return pass(fmt::format("{} configurations re-walked hop by hop, worst gap {:.1e}",
                          configs_checked, worst));
}

// --------------------------------------------------------------------------
// 7. Feasibility scores equal the weighted sum and survive weight rescaling.

Outcome criterion_feasibility() {
  const std::vector<std::vector<QualityFactor>> quality_sets = {
      {},
      {{"q1", 1.0, 0.4}},
      {{"q1", 2.0, -0.3}},
      {{"q1", 0.5, 2.0}, {"q2", 2.0, -0.5}},
      {{"q1", 1.0, -1.0}},
  };
  double worst = 0.0;
  for (const double we : {0.5, 1.0, 2.0}) {
    for (const double er : {0.1, 1.0, 10.0}) {
      for (const auto& qs : quality_sets) {
        FeasibilityInput input;
        input.energy_weight = we;
        input.energy_saving = er;
        input.qualities = qs;

        long double expected = static_cast<long double>(we) * er;
        for (const QualityFactor& q : qs) {
          expected += static_cast<long double>(q.weight) * q.delta;
        }
        const FeasibilityResult got = feasibility_score(input);
        worst = std::max(worst, std::fabs(got.score - static_cast<double>(expected)));
        const Decision want =
            got.score > 0.0 ? Decision::consider_reuse : Decision::skip;
        if (got.decision != want) return fail("decision does not follow the score sign");

        for (const double lambda : {0.01, 100.0}) {
          FeasibilityInput scaled = input;
          scaled.energy_weight *= lambda;
          for (QualityFactor& q : scaled.qualities) q.weight *= lambda;
          if (feasibility_score(scaled).decision != got.decision) {
            return fail(fmt::format("decision flips under weight scale {}", lambda));
          }
        }
      }
    }
  }
  // knife edge: a score of exactly zero skips, at any scale
  FeasibilityInput edge;
  edge.energy_weight = 2.0;
  edge.energy_saving = 0.5;
  edge.qualities = {{"q", 1.0, -1.0}};
  if (feasibility_score(edge).decision != Decision::skip) return fail("zero score must skip");
  if (worst > 1e-12) return fail(fmt::format("worst absolute gap {}", worst));
  return pass(fmt::format("45 weighted grids plus rescaling, worst gap {:.1e}", worst));
}

// --------------------------------------------------------------------------
// 8. The simulation command line is fast and byte-deterministic.

Outcome criterion_cli_determinism(const std::string& binary) {
  namespace fs = std::filesystem;
  if (binary.empty()) return fail("command-line binary path not supplied");

  const fs::path base = fs::temp_directory_path() / "pipeprof_acceptance";
  std::error_code ec;
  fs::remove_all(base, ec);

  const auto run_once = [&](const fs::path& dir) -> std::pair<bool, double> {
    fs::create_directories(dir);
    const std::string cmd =
        fmt::format("{} simulate --seed 42 --pipelines 100 --catalog-size 11 --out {} > {} 2>&1",
                    binary, dir.string(), (dir / "stdout.txt").string());
    const auto t0 = std::chrono::steady_clock::now();
    const int rc = std::system(cmd.c_str());
    return {rc == 0, seconds_since(t0)};
  };

  const fs::path dir1 = base / "run1";
  const fs::path dir2 = base / "run2";
  const auto [ok1, t1] = run_once(dir1);
  const auto [ok2, t2] = run_once(dir2);
  if (!ok1 || !ok2) return fail("simulate exited nonzero");
  if (t1 >= 10.0 || t2 >= 10.0) return fail(fmt::format("runs took {:.2f}s / {:.2f}s", t1, t2));

  for (const char* name : {"report.json", "membership.csv", "pairwise.txt"}) {
    const std::string first = read_text_file((dir1 / name).string());
    const std::string second = read_text_file((dir2 / name).string());
    if (first != second) return fail(fmt::format("{} differs between identical runs", name));
    if (first.empty()) return fail(fmt::format("{} is empty", name));
  }

  // population shape: 11 stage rows, one column per pipeline
  const std::string membership = read_text_file((dir1 / "membership.csv").string());
  std::vector<std::string> lines;
  for (std::size_t pos = 0; pos < membership.size();) {
    const std::size_t nl = membership.find('\n', pos);
    lines.push_back(membership.substr(pos, nl - pos));
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.size() != 12) return fail(fmt::format("membership has {} lines", lines.size()));
  const std::size_t commas =
      static_cast<std::size_t>(std::count(lines[0].begin(), lines[0].end(), ','));
  if (commas != 100) return fail(fmt::format("membership header has {} columns", commas + 1));
  if (lines[0].rfind("stage_id,p001,", 0) != 0) return fail("membership header malformed");

  const std::string pairwise = read_text_file((dir1 / "pairwise.txt").string());
  if (pairwise.rfind("P_A | P_B | CO | E_CO | E_CO/E_P_A | E_CO/E_P_B\n", 0) != 0) {
    return fail("pairwise table header malformed");
  }
  if (pairwise.find('%') == std::string::npos) return fail("pairwise table carries no ratios");

  const std::string report_text = read_text_file((dir1 / "report.json").string());
  const SimulationReport report = parse_simulation_report(report_text);
  if (report.pipelines.size() != 100 || report.catalog.size() != 11) {
    return fail("report population does not match the requested size");
  }

  fs::remove_all(base, ec);
  return pass(fmt::format("two runs, {:.2f}s / {:.2f}s, byte-identical outputs", t1, t2));
}

// --------------------------------------------------------------------------
// 9. Fully sharing identical pipelines with free transmission halves the
//    baseline exactly, not approximately.

Outcome criterion_exact_halving() {
  const StageCatalog catalog = validate_catalog({
      testutil::rec("f1", StageType::filtering, 411.0, 73.5, 2.0, 1.0, 12.25),
      testutil::rec("f2", StageType::anonymization, 97.25, 41.0, 1.0, 2.0, 3.5),
      testutil::rec("f3", StageType::filtering, 233.5, 11.75, 1.0, 1.0, 7.25),
  });
  const Pipeline a = testutil::pipe("a", {"f1", "f2", "f3"}, "prov", "cons-a");
  const Pipeline b = testutil::pipe("b", {"f1", "f2", "f3"}, "prov", "cons-b");
  EnergyCoefficients coeffs =
      EnergyCoefficients::uniform(PartyCoefficients{1.37, 2.12, 0.0, 0.0, 0.93});

  const auto configs = enumerate_configurations(a, b, catalog, coeffs);
  for (const ExecutionConfiguration& c : configs) {
    if (c.config_id != "cfg_l3_a0_b0") continue;
    if (c.estimated_j == c.baseline_j / 2.0 && c.saving_j == c.estimated_j) {
      return pass(fmt::format("estimate {} equals exactly half of baseline {}", c.estimated_j,
                              c.baseline_j));
    }
    return fail(fmt::format("estimate {} vs baseline {} (half is {})", c.estimated_j,
                            c.baseline_j, c.baseline_j / 2.0));
  }
  return fail("full-sharing configuration was not enumerated");
}

}  // namespace

int main(int argc, char** argv) {
  const std::string binary = argc > 1 ? argv[1] : "";

  const struct {
    int number;
    const char* name;
    std::function<Outcome()> check;
  } criteria[] = {
      {1, "energy categories sum to the reported total", criterion_profile_additivity},
      {2, "volumes chain by per-stage transformation factors", criterion_volume_chain},
      {3, "profiles scale linearly with source volume", criterion_linearity},
      {4, "common-stage detection matches brute-force scans", criterion_common_stages},
      {5, "shared-energy ratios stay within [0, 1]", criterion_ratio_bounds},
      {6, "configuration estimates match an explicit per-hop walk",
       criterion_configuration_estimates},
      {7, "feasibility scores equal the weighted sum", criterion_feasibility},
      {8, "simulation command line is deterministic",
       [&] { return criterion_cli_determinism(binary); }},
      {9, "full sharing of identical pipelines halves the baseline exactly",
       criterion_exact_halving},
  };

  for (const auto& c : criteria) {
    Outcome result{false, "unknown"};
    try {
      result = c.check();
    } catch (const std::exception& e) {
      result = fail(fmt::format("exception: {}", e.what()));
    }
    fmt::print("[{}] criterion {}: {}{}\n", result.first ? "PASS" : "FAIL", c.number, c.name,
               result.second.empty() ? std::string{} : fmt::format(" ({})", result.second));
    if (!result.first) ++g_failures;
  }
  return g_failures == 0 ? 0 : 1;
}
