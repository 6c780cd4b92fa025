// Command-line front end: profile, analyze, plan, simulate.

#include <fmt/core.h>
#include <fmt/ranges.h>

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pipeprof/io.hpp"

using namespace pipeprof;

namespace {

struct GlobalOpts {
  std::string coeffs_path;
  std::string out_dir;
  std::string format = "table";
  bool no_timestamp = false;

  bool machine() const { return format == "machine"; }
};

EnergyCoefficients load_coefficients(const GlobalOpts& g) {
  EnergyCoefficients coeffs = g.coeffs_path.empty() ? EnergyCoefficients{}
                                                    : parse_coefficients_file(g.coeffs_path);
  coeffs.validate();
  return coeffs;
}

// Prints to stdout, or into <out_dir>/<filename> when --out was given.
void deliver(const GlobalOpts& g, const std::string& filename, const std::string& content) {
  if (g.out_dir.empty()) {
    fmt::print("{}", content);
    return;
  }
  const std::string path = (std::filesystem::path(g.out_dir) / filename).string();
  write_text_file(path, content);
  fmt::print("wrote {}\n", path);
}

std::string table_header(const GlobalOpts& g) {
  return g.no_timestamp ? std::string{} : fmt::format("# generated {}\n", iso8601_utc_now());
}

double parse_double_strict(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(Errc::parse_error, fmt::format("cannot parse '{}' as a number in {}", text, what));
  }
  return value;
}

QualityFactor parse_quality(const std::string& text) {
  const auto eq = text.find('=');
  const auto colon = text.find(':', eq == std::string::npos ? 0 : eq + 1);
  if (eq == std::string::npos || colon == std::string::npos || eq == 0) {
    throw Error(Errc::parse_error,
                fmt::format("quality '{}' must look like name=weight:delta", text));
  }
  QualityFactor q;
  q.name = text.substr(0, eq);
  q.weight = parse_double_strict(std::string_view(text).substr(eq + 1, colon - eq - 1), text);
  q.delta = parse_double_strict(std::string_view(text).substr(colon + 1), text);
  return q;
}

DetectionPolicy policy_from_flag(const std::string& name) {
  return name == "prefix" ? DetectionPolicy::strict_prefix
                          : DetectionPolicy::contiguous_subsequence;
}

struct PairInputs {
  StageCatalog catalog;
  std::vector<Pipeline> pipelines;
  EnergyCoefficients coeffs;
};

PairInputs load_inputs(const GlobalOpts& g, const std::string& catalog_path,
                       const std::string& pipelines_path) {
  PairInputs in;
  in.catalog = parse_catalog_csv(catalog_path);
  in.pipelines = parse_pipelines_file(pipelines_path, in.catalog);
  in.coeffs = load_coefficients(g);
  return in;
}

void run_profile(const GlobalOpts& g, const std::string& catalog_path,
                 const std::string& pipelines_path) {
  const PairInputs in = load_inputs(g, catalog_path, pipelines_path);
  std::vector<PipelineEnergyProfile> profiles;
  profiles.reserve(in.pipelines.size());
  for (const Pipeline& p : in.pipelines) {
    profiles.push_back(pipeline_energy(p, in.catalog, in.coeffs));
  }
  if (g.machine()) {
    deliver(g, "profiles.json", emit_profiles_json(profiles));
    return;
  }
  std::string out = table_header(g);
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (i > 0) out += '\n';
    out += emit_profile_table(profiles[i]);
  }
  deliver(g, "profiles.txt", out);
}

void run_analyze(const GlobalOpts& g, const std::string& catalog_path,
                 const std::string& pipelines_path, const std::string& policy_name, double delta) {
  const PairInputs in = load_inputs(g, catalog_path, pipelines_path);
  const DetectionPolicy policy = policy_from_flag(policy_name);

  std::vector<PipelineEnergyProfile> profiles;
  profiles.reserve(in.pipelines.size());
  for (const Pipeline& p : in.pipelines) {
    profiles.push_back(pipeline_energy(p, in.catalog, in.coeffs));
  }

  std::vector<AnalysisEntry> entries;
  std::vector<CommonStageReport> reports;
  for (std::size_t i = 0; i < in.pipelines.size(); ++i) {
    for (std::size_t j = i + 1; j < in.pipelines.size(); ++j) {
      const auto common = common_stages(in.pipelines[i], in.pipelines[j], policy, in.catalog);
      if (common.empty()) continue;
      AnalysisEntry entry;
      entry.report = build_common_report(in.pipelines[i], in.pipelines[j], profiles[i], profiles[j],
                                         policy, in.catalog);
      entry.dominance = dominance_check(profiles[i], profiles[j], entry.report.common, delta);
      reports.push_back(entry.report);
      entries.push_back(std::move(entry));
    }
  }
  if (g.machine()) {
    deliver(g, "analysis.json", emit_analysis_json(entries));
  } else {
    deliver(g, "analysis.txt", table_header(g) + emit_pairwise_table(reports, in.pipelines));
  }
}

std::string plan_table(const CommonStageReport& report, const DominanceResult& dominance,
                       const PlanSet& set) {
  std::string out = fmt::format("plan for {} + {}\n", report.pipeline_a, report.pipeline_b);
  out += fmt::format("common stages ({}): {}\n", to_string(report.policy),
                     report.common.empty() ? "none" : fmt::format("{}", fmt::join(report.common, ",")));
  out += fmt::format("common energy: {} ({} of {}, {} of {})\n",
                     format_joules(report.common_energy_j), format_percent(report.ratio_a),
                     report.pipeline_a, format_percent(report.ratio_b), report.pipeline_b);
  out += fmt::format("dominant: {} {}, {} {}\n", report.pipeline_a,
                     dominance.pipeline_a ? "yes" : "no", report.pipeline_b,
                     dominance.pipeline_b ? "yes" : "no");
  out += "config | shared | offload_a | offload_b | estimated_j | saving_j | score | decision\n";
  for (const ReusePlan& p : set.plans) {
    out += fmt::format(
        "{} | {} | {} | {} | {} | {} | {} | {}\n", p.config.config_id,
        p.config.shared_stages.empty() ? "-"
                                       : fmt::format("{}", fmt::join(p.config.shared_stages, ",")),
        p.config.branches[0].offload_count(), p.config.branches[1].offload_count(),
        format_joules(p.config.estimated_j), format_joules(p.config.saving_j),
        p.feasibility ? format_joules(p.feasibility->score) : "-", to_string(p.decision()));
  }
  if (set.no_reuse_recommended) {
    out += "recommendation: keep the pipelines independent\n";
  } else {
    const ReusePlan& best = set.best();
    out += fmt::format("recommendation: {} (saves {} of baseline)\n", best.config.config_id,
                       format_percent(best.config.saving_j / best.config.baseline_j));
  }
  return out;
}

void run_plan(const GlobalOpts& g, const std::string& catalog_path,
              const std::string& pipelines_path, const std::vector<std::string>& pair_ids,
              double weight_energy, const std::vector<std::string>& quality_specs, double delta,
              const std::string& policy_name, const std::string& saving_mode) {
  const PairInputs in = load_inputs(g, catalog_path, pipelines_path);

  const auto pick = [&](const std::string& id) -> const Pipeline& {
    for (const Pipeline& p : in.pipelines) {
      if (p.pipeline_id == id) return p;
    }
    throw Error(Errc::parse_error,
                fmt::format("no pipeline '{}' in {}", id, pipelines_path));
  };
  if (pair_ids.empty() && in.pipelines.size() < 2) {
    throw Error(Errc::parse_error, "planning needs two pipelines; the file holds fewer");
  }
  const Pipeline& a = pair_ids.empty() ? in.pipelines[0] : pick(pair_ids[0]);
  const Pipeline& b = pair_ids.empty() ? in.pipelines[1] : pick(pair_ids[1]);

  FeasibilityWeights weights;
  weights.energy_weight = weight_energy;
  for (const std::string& spec : quality_specs) weights.qualities.push_back(parse_quality(spec));
  weights.mode = saving_mode == "raw" ? SavingMode::raw_joules : SavingMode::relative;

  const PlanSet set = recommend(a, b, in.catalog, in.coeffs, weights);

  const PipelineEnergyProfile profile_a = pipeline_energy(a, in.catalog, in.coeffs);
  const PipelineEnergyProfile profile_b = pipeline_energy(b, in.catalog, in.coeffs);
  // The attached report follows --policy; the plan space itself always
  // keys on the reusable prefix, the only thing that can run once.
  const CommonStageReport report =
      build_common_report(a, b, profile_a, profile_b, policy_from_flag(policy_name), in.catalog);
  const DominanceResult dominance = dominance_check(profile_a, profile_b, report.common, delta);

  if (g.machine()) {
    deliver(g, "plan.json", emit_plan_json(report, dominance, set));
  } else {
    deliver(g, "plan.txt", table_header(g) + plan_table(report, dominance, set));
  }
}

void run_simulate(const GlobalOpts& g, const PopulationSpec& spec, double weight_energy,
                  const std::vector<std::string>& quality_specs, const std::string& saving_mode,
                  double delta, const std::string& policy_name) {
  SimulationOptions options;
  options.weights.energy_weight = weight_energy;
  for (const std::string& q : quality_specs) options.weights.qualities.push_back(parse_quality(q));
  options.weights.mode = saving_mode == "raw" ? SavingMode::raw_joules : SavingMode::relative;
  options.dominance_factor = delta;
  options.report_policy = policy_from_flag(policy_name);

  const EnergyCoefficients coeffs = load_coefficients(g);
  const SimulationReport report = run_simulation(spec, coeffs, options);

  std::vector<CommonStageReport> reports;
  reports.reserve(report.pairs.size());
  for (const PairAnalysis& p : report.pairs) reports.push_back(p.report);

  const std::filesystem::path dir = g.out_dir.empty() ? "." : g.out_dir;
  const auto emit = [&](const char* name, const std::string& content) {
    const std::string path = (dir / name).string();
    write_text_file(path, content);
    return path;
  };
  const std::string report_path = emit("report.json", emit_simulation_report(report));
  const std::string matrix_path = emit("membership.csv", emit_membership_csv(report.membership));
  const std::string table_path =
      emit("pairwise.txt", emit_pairwise_table(reports, report.pipelines));

  fmt::print("seed {}: {} pipelines over {} stages, {} pairs with common stages\n",
             report.spec.seed, report.pipelines.size(), report.catalog.size(),
             report.pairs.size());
  fmt::print("wrote {}, {}, {}\n", report_path, matrix_path, table_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"energy profiling and reuse planning for data-sharing pipelines"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kToolVersion));

  GlobalOpts g;
  app.add_option("--coeffs", g.coeffs_path, "coefficient file (sections per party)");
  app.add_option("--out", g.out_dir, "write outputs into this directory instead of stdout");
  app.add_option("--format", g.format, "table or machine")
      ->check(CLI::IsMember({"table", "machine"}));
  app.add_flag("--no-timestamp", g.no_timestamp, "omit the generation timestamp from tables");

  std::string catalog_path;
  std::string pipelines_path;
  std::string policy_name = "subsequence";
  std::string saving_mode = "relative";
  double delta = kDominanceFactor;
  double weight_energy = 1.0;
  std::vector<std::string> quality_specs;
  std::vector<std::string> pair_ids;

  CLI::App* profile = app.add_subcommand("profile", "per-stage energy profiles");
  profile->add_option("--catalog", catalog_path, "stage catalog CSV")->required();
  profile->add_option("--pipelines", pipelines_path, "pipeline definitions")->required();

  CLI::App* analyze = app.add_subcommand("analyze", "pairwise common-stage reports");
  analyze->add_option("--catalog", catalog_path, "stage catalog CSV")->required();
  analyze->add_option("--pipelines", pipelines_path, "pipeline definitions")->required();
  analyze->add_option("--policy", policy_name, "common-stage detection: prefix or subsequence")
      ->check(CLI::IsMember({"prefix", "subsequence"}));
  analyze->add_option("--delta", delta, "dominance factor");

  CLI::App* plan = app.add_subcommand("plan", "configuration enumeration and feasibility");
  plan->add_option("--catalog", catalog_path, "stage catalog CSV")->required();
  plan->add_option("--pipelines", pipelines_path, "pipeline definitions")->required();
  plan->add_option("--pair", pair_ids, "the two pipeline ids to plan for")->expected(2);
  plan->add_option("--weight-energy", weight_energy, "feasibility weight of the energy term");
  plan->add_option("--quality", quality_specs,
                   "quality factor as name=weight:delta (repeatable)");
  plan->add_option("--delta", delta, "dominance factor");
  plan->add_option("--policy", policy_name, "detection policy for the attached report")
      ->check(CLI::IsMember({"prefix", "subsequence"}));
  plan->add_option("--saving-mode", saving_mode, "energy term: relative or raw")
      ->check(CLI::IsMember({"relative", "raw"}));

  PopulationSpec cli_spec;
  std::string spec_path;
  CLI::App* simulate = app.add_subcommand("simulate", "synthetic population run");
  auto* seed_opt = simulate->add_option("--seed", cli_spec.seed, "population seed");
  auto* count_opt = simulate->add_option("--pipelines", cli_spec.n_pipelines, "population size");
  auto* size_opt = simulate->add_option("--catalog-size", cli_spec.catalog_size, "catalog size");
  auto* min_opt = simulate->add_option("--min-len", cli_spec.min_len, "shortest pipeline");
  auto* max_opt = simulate->add_option("--max-len", cli_spec.max_len, "longest pipeline");
  auto* spec_opt = simulate->add_option("--spec", spec_path, "population spec file");
  simulate->add_option("--weight-energy", weight_energy, "feasibility weight of the energy term");
  simulate->add_option("--quality", quality_specs,
                       "quality factor as name=weight:delta (repeatable)");
  simulate->add_option("--delta", delta, "dominance factor");
  simulate->add_option("--policy", policy_name, "reporting policy: prefix or subsequence")
      ->check(CLI::IsMember({"prefix", "subsequence"}));
  simulate->add_option("--saving-mode", saving_mode, "energy term: relative or raw")
      ->check(CLI::IsMember({"relative", "raw"}));

  profile->callback([&] { run_profile(g, catalog_path, pipelines_path); });
  analyze->callback([&] { run_analyze(g, catalog_path, pipelines_path, policy_name, delta); });
  plan->callback([&] {
    run_plan(g, catalog_path, pipelines_path, pair_ids, weight_energy, quality_specs, delta,
             policy_name, saving_mode);
  });
  simulate->callback([&] {
    PopulationSpec spec;
    if (spec_opt->count() > 0) spec = parse_population_spec_file(spec_path);
    if (seed_opt->count() > 0) spec.seed = cli_spec.seed;
    if (count_opt->count() > 0) spec.n_pipelines = cli_spec.n_pipelines;
    if (min_opt->count() > 0) spec.min_len = cli_spec.min_len;
    if (max_opt->count() > 0) spec.max_len = cli_spec.max_len;
    if (size_opt->count() > 0) {
      spec.catalog_size = cli_spec.catalog_size;
      // The flag replaces whatever mix was in force; an explicit mix
      // only makes sense in a spec file.
      spec.type_mix = TypeMix::for_size(spec.catalog_size);
    }
    run_simulate(g, spec, weight_energy, quality_specs, saving_mode, delta, policy_name);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help / --version
  } catch (const CLI::ParseError& e) {
    fmt::print(stderr, "{}\n\n{}", e.what(), app.help());
    return 1;
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return e.is_io() ? 2 : 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
