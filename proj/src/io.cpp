#include "pipeprof/io.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

#include "json.hpp"

namespace pipeprof {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kWhitespace = " \t\r\n";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(kWhitespace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kWhitespace);
  return s.substr(first, last - first + 1);
}

std::string_view strip_bom(std::string_view text) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") return text.substr(3);
  return text;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return lines;
}

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      break;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

// One CSV row; double quotes group fields, "" inside quotes escapes one.
std::vector<std::string> split_csv_row(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  for (std::string& f : fields) f = std::string(trim(f));
  return fields;
}

double parse_double_at(std::string_view field, std::string_view source, std::size_t line,
                       std::string_view what) {
  const std::string_view t = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw Error(Errc::unparsable_number,
                fmt::format("{}: line {}: {}: cannot parse '{}' as a number", source, line, what,
                            field));
  }
  return value;
}

std::uint64_t parse_u64_at(std::string_view field, std::string_view source, std::size_t line,
                           std::string_view what) {
  const std::string_view t = trim(field);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw Error(Errc::unparsable_number,
                fmt::format("{}: line {}: {}: cannot parse '{}' as a whole number", source, line,
                            what, field));
  }
  return value;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Plain file access

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, fmt::format("cannot open '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(Errc::io_failure, fmt::format("failed reading '{}'", path));
  return std::move(buf).str();
}

void write_text_file(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);  // open failure below reports the problem
  }
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_failure, fmt::format("cannot open '{}' for writing", path));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw Error(Errc::io_failure, fmt::format("failed writing '{}'", path));
}

// ---------------------------------------------------------------------------
// Catalog CSV

namespace {

constexpr std::array<std::string_view, 7> kCatalogColumns = {
    "stages_id",        "stages_type",       "cpu_usage_unit", "memory_usage_unit",
    "output_data_volume", "input_data_volume", "observation_unit"};

}  // namespace

StageCatalog parse_catalog_text(std::string_view text, std::string_view source) {
  const auto lines = split_lines(strip_bom(text));
  std::size_t header_idx = 0;
  while (header_idx < lines.size() && trim(lines[header_idx]).empty()) ++header_idx;
  if (header_idx == lines.size()) {
    throw Error(Errc::empty_file, fmt::format("'{}' holds no data", source));
  }

  const auto header = split_csv_row(lines[header_idx]);
  std::array<std::optional<std::size_t>, kCatalogColumns.size()> where;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto it = std::find(kCatalogColumns.begin(), kCatalogColumns.end(), header[i]);
    if (it == kCatalogColumns.end()) {
      throw Error(Errc::unexpected_column,
                  fmt::format("{}: unexpected column '{}'", source, header[i]));
    }
    const auto k = static_cast<std::size_t>(it - kCatalogColumns.begin());
    if (where[k]) {
      throw Error(Errc::unexpected_column,
                  fmt::format("{}: duplicate column '{}'", source, header[i]));
    }
    where[k] = i;
  }
  for (std::size_t k = 0; k < kCatalogColumns.size(); ++k) {
    if (!where[k]) {
      throw Error(Errc::missing_column,
                  fmt::format("{}: missing column '{}'", source, kCatalogColumns[k]));
    }
  }

  std::vector<StageRecord> records;
  for (std::size_t li = header_idx + 1; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    const std::size_t line_no = li + 1;
    const auto fields = split_csv_row(lines[li]);
    if (fields.size() != header.size()) {
      throw Error(Errc::parse_error,
                  fmt::format("{}: line {}: {} fields where the header names {}", source, line_no,
                              fields.size(), header.size()));
    }
    const auto cell = [&](std::size_t k) -> const std::string& { return fields[*where[k]]; };
    StageRecord r;
    r.stage_id = cell(0);
    if (r.stage_id.empty()) {
      throw Error(Errc::parse_error, fmt::format("{}: line {}: empty stages_id", source, line_no));
    }
    r.stage_type = parse_stage_type(cell(1));
    r.cpu_usage_unit = parse_double_at(cell(2), source, line_no, "cpu_usage_unit");
    r.memory_usage_unit = parse_double_at(cell(3), source, line_no, "memory_usage_unit");
    r.output_data_volume = parse_double_at(cell(4), source, line_no, "output_data_volume");
    r.input_data_volume = parse_double_at(cell(5), source, line_no, "input_data_volume");
    r.observation_unit = parse_double_at(cell(6), source, line_no, "observation_unit");
    records.push_back(std::move(r));
  }
  return validate_catalog(std::move(records));
}

StageCatalog parse_catalog_csv(const std::string& path) {
  return parse_catalog_text(read_text_file(path), path);
}

// ---------------------------------------------------------------------------
// Pipelines file

std::vector<Pipeline> parse_pipelines_text(std::string_view text, const StageCatalog& catalog,
                                           std::string_view source) {
  const auto lines = split_lines(strip_bom(text));
  std::vector<Pipeline> out;
  std::set<std::string, std::less<>> seen;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    std::string_view content = lines[li];
    if (const auto hash = content.find('#'); hash != std::string_view::npos) {
      content = content.substr(0, hash);
    }
    if (trim(content).empty()) continue;

    const auto parts = split_on(content, ';');
    if (parts.size() < 4 || parts.size() > 5) {
      throw Error(Errc::parse_error,
                  fmt::format("{}: line {}: expected 'id; provider; consumer; stages[; placements]'",
                              source, line_no));
    }
    Pipeline p;
    p.pipeline_id = std::string(trim(parts[0]));
    const std::string provider_id(trim(parts[1]));
    const std::string consumer_id(trim(parts[2]));
    if (p.pipeline_id.empty() || provider_id.empty() || consumer_id.empty()) {
      throw Error(Errc::parse_error,
                  fmt::format("{}: line {}: pipeline id and both parties must be non-empty", source,
                              line_no));
    }
    p.provider = Party::provider(provider_id);
    p.consumer = Party::consumer(consumer_id);

    std::vector<std::string> stage_ids;
    if (!trim(parts[3]).empty()) {
      for (const auto token : split_on(parts[3], ',')) {
        const auto id = trim(token);
        if (id.empty()) {
          throw Error(Errc::parse_error,
                      fmt::format("{}: line {}: empty stage id in '{}'", source, line_no, parts[3]));
        }
        stage_ids.emplace_back(id);
      }
    }

    std::vector<Side> placements(stage_ids.size(), Side::provider);
    if (parts.size() == 5) {
      const auto tokens = split_on(parts[4], ',');
      if (tokens.size() != stage_ids.size()) {
        throw Error(Errc::parse_error,
                    fmt::format("{}: line {}: {} placements for {} stages", source, line_no,
                                tokens.size(), stage_ids.size()));
      }
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto t = trim(tokens[i]);
        if (t == "provider") {
          placements[i] = Side::provider;
        } else if (t == "consumer") {
          placements[i] = Side::consumer;
        } else {
          throw Error(Errc::parse_error,
                      fmt::format("{}: line {}: placement '{}' is neither provider nor consumer",
                                  source, line_no, t));
        }
      }
    }
    p.stages.reserve(stage_ids.size());
    for (std::size_t i = 0; i < stage_ids.size(); ++i) {
      p.stages.push_back(PlacedStage{std::move(stage_ids[i]), placements[i]});
    }

    if (!seen.insert(p.pipeline_id).second) {
      throw Error(Errc::parse_error, fmt::format("{}: line {}: duplicate pipeline id '{}'", source,
                                                 line_no, p.pipeline_id));
    }
    try {
      out.push_back(validate_pipeline(std::move(p), catalog));
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("{}: line {}: {}", source, line_no, e.what()));
    }
  }
  if (out.empty()) {
    throw Error(Errc::empty_file, fmt::format("'{}' holds no pipeline records", source));
  }
  return out;
}

std::vector<Pipeline> parse_pipelines_file(const std::string& path, const StageCatalog& catalog) {
  return parse_pipelines_text(read_text_file(path), catalog, path);
}

// ---------------------------------------------------------------------------
// Coefficients file

namespace {

void apply_coefficient(PartyCoefficients& c, std::string_view key, double value,
                       std::string_view source, std::size_t line) {
  if (key == "joules_per_cpu_unit") {
    c.joules_per_cpu_unit = value;
  } else if (key == "joules_per_memory_unit") {
    c.joules_per_memory_unit = value;
  } else if (key == "joules_per_gb_transmitted_cross_party") {
    c.joules_per_gb_transmitted_cross_party = value;
  } else if (key == "joules_per_gb_transmitted_intra_party") {
    c.joules_per_gb_transmitted_intra_party = value;
  } else if (key == "joules_per_observation_unit") {
    c.joules_per_observation_unit = value;
  } else {
    throw Error(Errc::parse_error,
                fmt::format("{}: line {}: unknown coefficient '{}'", source, line, key));
  }
}

}  // namespace

EnergyCoefficients parse_coefficients_text(std::string_view text, std::string_view source) {
  struct Section {
    std::string name;
    std::vector<std::tuple<std::string, std::string, std::size_t>> entries;  // key, value, line
  };
  std::vector<Section> sections;
  std::optional<std::size_t> current;
  bool any_content = false;

  const auto lines = split_lines(strip_bom(text));
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    std::string_view content = lines[li];
    if (const auto pos = content.find_first_of("#;"); pos != std::string_view::npos) {
      content = content.substr(0, pos);
    }
    const auto s = trim(content);
    if (s.empty()) continue;
    any_content = true;

    if (s.front() == '[') {
      if (s.back() != ']') {
        throw Error(Errc::parse_error,
                    fmt::format("{}: line {}: unterminated section header", source, line_no));
      }
      const auto name = trim(s.substr(1, s.size() - 2));
      if (name.empty()) {
        throw Error(Errc::parse_error, fmt::format("{}: line {}: empty section name", source, line_no));
      }
      const auto it = std::find_if(sections.begin(), sections.end(),
                                   [&](const Section& sec) { return sec.name == name; });
      if (it != sections.end()) {
        current = static_cast<std::size_t>(it - sections.begin());
      } else {
        sections.push_back(Section{std::string(name), {}});
        current = sections.size() - 1;
      }
      continue;
    }

    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::parse_error,
                  fmt::format("{}: line {}: expected 'key = value'", source, line_no));
    }
    if (!current) {
      throw Error(Errc::parse_error,
                  fmt::format("{}: line {}: key before any [section]", source, line_no));
    }
    sections[*current].entries.emplace_back(std::string(trim(s.substr(0, eq))),
                                            std::string(trim(s.substr(eq + 1))), line_no);
  }
  if (!any_content) throw Error(Errc::empty_file, fmt::format("'{}' holds no data", source));

  const auto apply_all = [&](PartyCoefficients base, const Section& sec) {
    for (const auto& [key, value, line_no] : sec.entries) {
      apply_coefficient(base, key, parse_double_at(value, source, line_no, key), source, line_no);
    }
    return base;
  };

  EnergyCoefficients out;
  const auto default_it = std::find_if(sections.begin(), sections.end(),
                                       [](const Section& sec) { return sec.name == "default"; });
  if (default_it != sections.end()) {
    out.defaults = apply_all(PartyCoefficients{}, *default_it);
  } else {
    out.defaults = std::nullopt;
  }
  for (const Section& sec : sections) {
    if (sec.name == "default") continue;
    out.per_party[sec.name] = apply_all(out.defaults.value_or(PartyCoefficients{}), sec);
  }
  out.validate();
  return out;
}

EnergyCoefficients parse_coefficients_file(const std::string& path) {
  return parse_coefficients_text(read_text_file(path), path);
}

// ---------------------------------------------------------------------------
// Population spec file

PopulationSpec parse_population_spec_text(std::string_view text, std::string_view source) {
  PopulationSpec spec;
  bool any_content = false;
  bool mix_seen = false;

  const auto parse_range = [&](std::string_view value, std::size_t line_no,
                               std::string_view what) -> ValueRange {
    const auto parts = split_on(value, ':');
    if (parts.size() != 2) {
      throw Error(Errc::parse_error,
                  fmt::format("{}: line {}: {} range must look like 'min:max'", source, line_no,
                              what));
    }
    return ValueRange{parse_double_at(parts[0], source, line_no, what),
                      parse_double_at(parts[1], source, line_no, what)};
  };

  const auto lines = split_lines(strip_bom(text));
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    std::string_view content = lines[li];
    if (const auto hash = content.find('#'); hash != std::string_view::npos) {
      content = content.substr(0, hash);
    }
    const auto s = trim(content);
    if (s.empty()) continue;
    any_content = true;

    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::parse_error,
                  fmt::format("{}: line {}: expected 'key = value'", source, line_no));
    }
    const auto key = trim(s.substr(0, eq));
    const auto value = trim(s.substr(eq + 1));

    if (key == "pipelines") {
      spec.n_pipelines = parse_u64_at(value, source, line_no, key);
    } else if (key == "catalog_size") {
      spec.catalog_size = parse_u64_at(value, source, line_no, key);
    } else if (key == "min_len") {
      spec.min_len = parse_u64_at(value, source, line_no, key);
    } else if (key == "max_len") {
      spec.max_len = parse_u64_at(value, source, line_no, key);
    } else if (key == "seed") {
      spec.seed = parse_u64_at(value, source, line_no, key);
    } else if (key == "cpu") {
      spec.usage_ranges.cpu = parse_range(value, line_no, key);
    } else if (key == "memory") {
      spec.usage_ranges.memory = parse_range(value, line_no, key);
    } else if (key == "input_volume") {
      spec.usage_ranges.input_volume = parse_range(value, line_no, key);
    } else if (key == "output_volume") {
      spec.usage_ranges.output_volume = parse_range(value, line_no, key);
    } else if (key == "observation") {
      spec.usage_ranges.observation = parse_range(value, line_no, key);
    } else if (key == "type_mix") {
      mix_seen = true;
      spec.type_mix = TypeMix{0, 0, 0, 0, 0};
      for (const auto token : split_on(value, ',')) {
        const auto pair = split_on(token, ':');
        if (pair.size() != 2) {
          throw Error(Errc::parse_error,
                      fmt::format("{}: line {}: type mix entries look like 'filtering:3'", source,
                                  line_no));
        }
        const auto name = trim(pair[0]);
        const std::size_t count = parse_u64_at(pair[1], source, line_no, "type mix count");
        if (name == "filtering") {
          spec.type_mix.filtering = count;
        } else if (name == "anonymization") {
          spec.type_mix.anonymization = count;
        } else if (name == "aggregation") {
          spec.type_mix.aggregation = count;
        } else if (name == "converting") {
          spec.type_mix.converting = count;
        } else if (name == "custom") {
          spec.type_mix.custom = count;
        } else {
          throw Error(Errc::parse_error,
                      fmt::format("{}: line {}: unknown stage type '{}' in type mix", source,
                                  line_no, name));
        }
      }
    } else {
      throw Error(Errc::parse_error,
                  fmt::format("{}: line {}: unknown key '{}'", source, line_no, key));
    }
  }
  if (!any_content) throw Error(Errc::empty_file, fmt::format("'{}' holds no data", source));
  if (!mix_seen) spec.type_mix = TypeMix::for_size(spec.catalog_size);
  validate_spec(spec);
  return spec;
}

PopulationSpec parse_population_spec_file(const std::string& path) {
  return parse_population_spec_text(read_text_file(path), path);
}

// ---------------------------------------------------------------------------
// Display formatting

std::string format_joules(double joules) { return fmt::format("{}", joules); }

std::string format_percent(double ratio) {
  // nearbyint under the default rounding mode gives half-to-even.
  const double scaled = std::nearbyint(ratio * 1000.0) / 10.0;
  return fmt::format("{:.1f}%", scaled);
}

std::string iso8601_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// Tables and matrices

std::string emit_profile_table(const PipelineEnergyProfile& profile) {
  std::string out = fmt::format("pipeline {} (source {} GB)\n", profile.pipeline_id,
                                format_joules(profile.normalized_to_gb));
  out +=
      "stage | input_gb | output_gb | factor | class | cpu_j | memory_j | operational_j | "
      "transmission_j | observation_j\n";
  for (const StageProfile& s : profile.stages) {
    out += fmt::format("{} | {} | {} | {} | {} | {} | {} | {} | {} | {}\n", s.volume.stage_id,
                       format_joules(s.volume.input_gb), format_joules(s.volume.output_gb),
                       format_joules(s.volume.factor), to_string(s.volume.tf_class),
                       format_joules(s.energy.cpu_j), format_joules(s.energy.memory_j),
                       format_joules(s.energy.operational_j), format_joules(s.energy.transmission_j),
                       format_joules(s.energy.observation_j));
  }
  out += fmt::format("totals: operational {} | transmission {} | observation {} | total {}\n",
                     format_joules(profile.operational_j()), format_joules(profile.transmission_j),
                     format_joules(profile.observation_j), format_joules(profile.total_j));
  if (profile.collapse_at) {
    out += fmt::format("warning: data volume collapses to zero at stage {}\n",
                       profile.stages[*profile.collapse_at].volume.stage_id);
  }
  return out;
}

std::string emit_pairwise_table(const std::vector<CommonStageReport>& reports,
                                const std::vector<Pipeline>& pipelines) {
  std::map<std::string, std::string, std::less<>> sequences;
  for (const Pipeline& p : pipelines) sequences[p.pipeline_id] = join(p.stage_ids(), ",");
  const auto sequence_of = [&](const std::string& id) -> std::string {
    const auto it = sequences.find(id);
    return it == sequences.end() ? id : it->second;
  };

  std::vector<CommonStageReport> rows = reports;
  std::sort(rows.begin(), rows.end(), [](const CommonStageReport& x, const CommonStageReport& y) {
    if (x.common_energy_j != y.common_energy_j) return x.common_energy_j > y.common_energy_j;
    if (x.pipeline_a != y.pipeline_a) return x.pipeline_a < y.pipeline_a;
    return x.pipeline_b < y.pipeline_b;
  });

  std::string out = "P_A | P_B | CO | E_CO | E_CO/E_P_A | E_CO/E_P_B\n";
  for (const CommonStageReport& r : rows) {
    out += fmt::format("{} | {} | {} | {} | {} | {}\n", sequence_of(r.pipeline_a),
                       sequence_of(r.pipeline_b), join(r.common, ","),
                       format_joules(r.common_energy_j), format_percent(r.ratio_a),
                       format_percent(r.ratio_b));
  }
  return out;
}

std::string emit_membership_csv(const MembershipMatrix& matrix) {
  std::string out = "stage_id";
  for (const std::string& id : matrix.pipeline_ids) {
    out += ',';
    out += id;
  }
  out += '\n';
  if (matrix.pipeline_ids.empty()) return out;
  for (std::size_t i = 0; i < matrix.stage_ids.size(); ++i) {
    out += matrix.stage_ids[i];
    for (const std::uint8_t cell : matrix.cells[i]) {
      out += ',';
      out += cell ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON documents

namespace {

[[noreturn]] void bad_document(const std::string& why) {
  throw Error(Errc::parse_error, fmt::format("malformed report: {}", why));
}

StageType stage_type_from(std::string_view s) {
  for (const StageType t : {StageType::filtering, StageType::anonymization, StageType::aggregation,
                            StageType::converting, StageType::custom}) {
    if (s == to_string(t)) return t;
  }
  bad_document(fmt::format("unknown stage type '{}'", s));
}

TfClass tf_class_from(std::string_view s) {
  for (const TfClass c : {TfClass::compression, TfClass::expansion, TfClass::preservation}) {
    if (s == to_string(c)) return c;
  }
  bad_document(fmt::format("unknown transformation class '{}'", s));
}

Side side_from(std::string_view s) {
  if (s == "provider") return Side::provider;
  if (s == "consumer") return Side::consumer;
  bad_document(fmt::format("unknown side '{}'", s));
}

DetectionPolicy policy_from(std::string_view s) {
  if (s == to_string(DetectionPolicy::strict_prefix)) return DetectionPolicy::strict_prefix;
  if (s == to_string(DetectionPolicy::contiguous_subsequence)) {
    return DetectionPolicy::contiguous_subsequence;
  }
  bad_document(fmt::format("unknown detection policy '{}'", s));
}

Decision decision_from(std::string_view s) {
  if (s == to_string(Decision::consider_reuse)) return Decision::consider_reuse;
  if (s == to_string(Decision::skip)) return Decision::skip;
  bad_document(fmt::format("unknown decision '{}'", s));
}

ordered_json range_json(const ValueRange& r) { return ordered_json::array({r.min, r.max}); }

ValueRange range_from(const ordered_json& j) {
  return ValueRange{j.at(0).get<double>(), j.at(1).get<double>()};
}

ordered_json party_coefficients_json(const PartyCoefficients& c) {
  return ordered_json{{"joules_per_cpu_unit", c.joules_per_cpu_unit},
                      {"joules_per_memory_unit", c.joules_per_memory_unit},
                      {"joules_per_gb_transmitted_cross_party", c.joules_per_gb_transmitted_cross_party},
                      {"joules_per_gb_transmitted_intra_party", c.joules_per_gb_transmitted_intra_party},
                      {"joules_per_observation_unit", c.joules_per_observation_unit}};
}

PartyCoefficients party_coefficients_from(const ordered_json& j) {
  PartyCoefficients c;
  c.joules_per_cpu_unit = j.at("joules_per_cpu_unit").get<double>();
  c.joules_per_memory_unit = j.at("joules_per_memory_unit").get<double>();
  c.joules_per_gb_transmitted_cross_party = j.at("joules_per_gb_transmitted_cross_party").get<double>();
  c.joules_per_gb_transmitted_intra_party = j.at("joules_per_gb_transmitted_intra_party").get<double>();
  c.joules_per_observation_unit = j.at("joules_per_observation_unit").get<double>();
  return c;
}

ordered_json coefficients_json(const EnergyCoefficients& c) {
  ordered_json j;
  j["default"] = c.defaults ? party_coefficients_json(*c.defaults) : ordered_json(nullptr);
  ordered_json per = ordered_json::object();
  for (const auto& [id, pc] : c.per_party) per[id] = party_coefficients_json(pc);
  j["per_party"] = std::move(per);
  return j;
}

EnergyCoefficients coefficients_from(const ordered_json& j) {
  EnergyCoefficients c;
  if (j.at("default").is_null()) {
    c.defaults = std::nullopt;
  } else {
    c.defaults = party_coefficients_from(j.at("default"));
  }
  for (const auto& [id, pc] : j.at("per_party").items()) {
    c.per_party[id] = party_coefficients_from(pc);
  }
  return c;
}

ordered_json type_mix_json(const TypeMix& m) {
  return ordered_json{{"filtering", m.filtering},
                      {"anonymization", m.anonymization},
                      {"aggregation", m.aggregation},
                      {"converting", m.converting},
                      {"custom", m.custom}};
}

TypeMix type_mix_from(const ordered_json& j) {
  TypeMix m;
  m.filtering = j.at("filtering").get<std::size_t>();
  m.anonymization = j.at("anonymization").get<std::size_t>();
  m.aggregation = j.at("aggregation").get<std::size_t>();
  m.converting = j.at("converting").get<std::size_t>();
  m.custom = j.at("custom").get<std::size_t>();
  return m;
}

ordered_json spec_json(const PopulationSpec& s) {
  ordered_json j;
  j["pipelines"] = s.n_pipelines;
  j["catalog_size"] = s.catalog_size;
  j["min_len"] = s.min_len;
  j["max_len"] = s.max_len;
  j["seed"] = s.seed;
  j["type_mix"] = type_mix_json(s.type_mix);
  j["usage_ranges"] = ordered_json{{"cpu", range_json(s.usage_ranges.cpu)},
                                   {"memory", range_json(s.usage_ranges.memory)},
                                   {"input_volume", range_json(s.usage_ranges.input_volume)},
                                   {"output_volume", range_json(s.usage_ranges.output_volume)},
                                   {"observation", range_json(s.usage_ranges.observation)}};
  return j;
}

PopulationSpec spec_from(const ordered_json& j) {
  PopulationSpec s;
  s.n_pipelines = j.at("pipelines").get<std::size_t>();
  s.catalog_size = j.at("catalog_size").get<std::size_t>();
  s.min_len = j.at("min_len").get<std::size_t>();
  s.max_len = j.at("max_len").get<std::size_t>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.type_mix = type_mix_from(j.at("type_mix"));
  const ordered_json& r = j.at("usage_ranges");
  s.usage_ranges.cpu = range_from(r.at("cpu"));
  s.usage_ranges.memory = range_from(r.at("memory"));
  s.usage_ranges.input_volume = range_from(r.at("input_volume"));
  s.usage_ranges.output_volume = range_from(r.at("output_volume"));
  s.usage_ranges.observation = range_from(r.at("observation"));
  return s;
}

ordered_json record_json(const StageRecord& r) {
  return ordered_json{{"stage_id", r.stage_id},
                      {"stage_type", std::string(to_string(r.stage_type))},
                      {"cpu_usage_unit", r.cpu_usage_unit},
                      {"memory_usage_unit", r.memory_usage_unit},
                      {"input_data_volume", r.input_data_volume},
                      {"output_data_volume", r.output_data_volume},
                      {"observation_unit", r.observation_unit}};
}

StageRecord record_from(const ordered_json& j) {
  StageRecord r;
  r.stage_id = j.at("stage_id").get<std::string>();
  r.stage_type = stage_type_from(j.at("stage_type").get<std::string>());
  r.cpu_usage_unit = j.at("cpu_usage_unit").get<double>();
  r.memory_usage_unit = j.at("memory_usage_unit").get<double>();
  r.input_data_volume = j.at("input_data_volume").get<double>();
  r.output_data_volume = j.at("output_data_volume").get<double>();
  r.observation_unit = j.at("observation_unit").get<double>();
  return r;
}

ordered_json pipeline_json(const Pipeline& p) {
  ordered_json stages = ordered_json::array();
  for (const PlacedStage& s : p.stages) {
    stages.push_back(ordered_json{{"stage_id", s.stage_id},
                                  {"placement", std::string(to_string(s.placement))}});
  }
  return ordered_json{{"pipeline_id", p.pipeline_id},
                      {"provider", p.provider.party_id},
                      {"consumer", p.consumer.party_id},
                      {"source_volume_gb", p.source_volume_gb},
                      {"stages", std::move(stages)}};
}

Pipeline pipeline_from(const ordered_json& j) {
  Pipeline p;
  p.pipeline_id = j.at("pipeline_id").get<std::string>();
  p.provider = Party::provider(j.at("provider").get<std::string>());
  p.consumer = Party::consumer(j.at("consumer").get<std::string>());
  p.source_volume_gb = j.at("source_volume_gb").get<double>();
  for (const ordered_json& s : j.at("stages")) {
    p.stages.push_back(PlacedStage{s.at("stage_id").get<std::string>(),
                                   side_from(s.at("placement").get<std::string>())});
  }
  return p;
}

ordered_json stage_profile_json(const StageProfile& s) {
  return ordered_json{{"stage_id", s.volume.stage_id},
                      {"input_gb", s.volume.input_gb},
                      {"output_gb", s.volume.output_gb},
                      {"factor", s.volume.factor},
                      {"tf_class", std::string(to_string(s.volume.tf_class))},
                      {"cpu_j", s.energy.cpu_j},
                      {"memory_j", s.energy.memory_j},
                      {"operational_j", s.energy.operational_j},
                      {"transmission_j", s.energy.transmission_j},
                      {"observation_j", s.energy.observation_j}};
}

StageProfile stage_profile_from(const ordered_json& j) {
  StageProfile s;
  s.volume.stage_id = j.at("stage_id").get<std::string>();
  s.energy.stage_id = s.volume.stage_id;
  s.volume.input_gb = j.at("input_gb").get<double>();
  s.volume.output_gb = j.at("output_gb").get<double>();
  s.volume.factor = j.at("factor").get<double>();
  s.volume.tf_class = tf_class_from(j.at("tf_class").get<std::string>());
  s.energy.cpu_j = j.at("cpu_j").get<double>();
  s.energy.memory_j = j.at("memory_j").get<double>();
  s.energy.operational_j = j.at("operational_j").get<double>();
  s.energy.transmission_j = j.at("transmission_j").get<double>();
  s.energy.observation_j = j.at("observation_j").get<double>();
  return s;
}

ordered_json profile_json(const PipelineEnergyProfile& p) {
  ordered_json stages = ordered_json::array();
  for (const StageProfile& s : p.stages) stages.push_back(stage_profile_json(s));
  ordered_json j;
  j["pipeline_id"] = p.pipeline_id;
  j["normalized_to_gb"] = p.normalized_to_gb;
  j["collapse_at"] = p.collapse_at ? ordered_json(*p.collapse_at) : ordered_json(nullptr);
  j["stages"] = std::move(stages);
  j["operational_j"] = p.operational_j();  // derived; readers recompute
  j["transmission_j"] = p.transmission_j;
  j["observation_j"] = p.observation_j;
  j["total_j"] = p.total_j;
  return j;
}

PipelineEnergyProfile profile_from(const ordered_json& j) {
  PipelineEnergyProfile p;
  p.pipeline_id = j.at("pipeline_id").get<std::string>();
  p.normalized_to_gb = j.at("normalized_to_gb").get<double>();
  if (!j.at("collapse_at").is_null()) p.collapse_at = j.at("collapse_at").get<std::size_t>();
  for (const ordered_json& s : j.at("stages")) p.stages.push_back(stage_profile_from(s));
  p.transmission_j = j.at("transmission_j").get<double>();
  p.observation_j = j.at("observation_j").get<double>();
  p.total_j = j.at("total_j").get<double>();
  return p;
}

ordered_json common_report_json(const CommonStageReport& r) {
  ordered_json j;
  j["pipeline_a"] = r.pipeline_a;
  j["pipeline_b"] = r.pipeline_b;
  j["policy"] = std::string(to_string(r.policy));
  j["common"] = r.common;
  j["common_energy_j"] = r.common_energy_j;
  j["ratio_a"] = r.ratio_a;
  j["ratio_b"] = r.ratio_b;
  j["display"] = ordered_json{{"common_energy", format_joules(r.common_energy_j)},
                              {"ratio_a", format_percent(r.ratio_a)},
                              {"ratio_b", format_percent(r.ratio_b)}};
  return j;
}

CommonStageReport common_report_from(const ordered_json& j) {
  CommonStageReport r;
  r.pipeline_a = j.at("pipeline_a").get<std::string>();
  r.pipeline_b = j.at("pipeline_b").get<std::string>();
  r.policy = policy_from(j.at("policy").get<std::string>());
  r.common = j.at("common").get<std::vector<std::string>>();
  r.common_energy_j = j.at("common_energy_j").get<double>();
  r.ratio_a = j.at("ratio_a").get<double>();
  r.ratio_b = j.at("ratio_b").get<double>();
  return r;
}

ordered_json dominance_json(const DominanceResult& d) {
  return ordered_json{{"pipeline_a", d.pipeline_a}, {"pipeline_b", d.pipeline_b}};
}

DominanceResult dominance_from(const ordered_json& j) {
  return DominanceResult{j.at("pipeline_a").get<bool>(), j.at("pipeline_b").get<bool>()};
}

ordered_json branch_json(const BranchPlan& b) {
  return ordered_json{{"pipeline_id", b.pipeline_id},
                      {"stages", b.stages},
                      {"consumer_offload_from", b.consumer_offload_from},
                      {"energy_j", b.energy_j}};
}

BranchPlan branch_from(const ordered_json& j) {
  BranchPlan b;
  b.pipeline_id = j.at("pipeline_id").get<std::string>();
  b.stages = j.at("stages").get<std::vector<std::string>>();
  b.consumer_offload_from = j.at("consumer_offload_from").get<std::size_t>();
  b.energy_j = j.at("energy_j").get<double>();
  return b;
}

ordered_json config_json(const ExecutionConfiguration& c) {
  ordered_json branches = ordered_json::array();
  for (const BranchPlan& b : c.branches) branches.push_back(branch_json(b));
  ordered_json j;
  j["config_id"] = c.config_id;
  j["shared_stages"] = c.shared_stages;
  j["branches"] = std::move(branches);
  j["shared_j"] = c.shared_j;
  j["estimated_j"] = c.estimated_j;
  j["baseline_j"] = c.baseline_j;
  j["saving_j"] = c.saving_j;
  return j;
}

ExecutionConfiguration config_from(const ordered_json& j) {
  ExecutionConfiguration c;
  c.config_id = j.at("config_id").get<std::string>();
  c.shared_stages = j.at("shared_stages").get<std::vector<std::string>>();
  for (const ordered_json& b : j.at("branches")) c.branches.push_back(branch_from(b));
  c.shared_j = j.at("shared_j").get<double>();
  c.estimated_j = j.at("estimated_j").get<double>();
  c.baseline_j = j.at("baseline_j").get<double>();
  c.saving_j = j.at("saving_j").get<double>();
  return c;
}

ordered_json plan_json(const ReusePlan& p) {
  ordered_json j;
  j["config"] = config_json(p.config);
  if (p.feasibility) {
    j["feasibility"] = ordered_json{{"score", p.feasibility->score},
                                    {"decision", std::string(to_string(p.feasibility->decision))}};
  } else {
    j["feasibility"] = nullptr;
  }
  j["decision"] = std::string(to_string(p.decision()));  // derived; readers recompute
  return j;
}

ReusePlan plan_from(const ordered_json& j) {
  ReusePlan p;
  p.config = config_from(j.at("config"));
  if (!j.at("feasibility").is_null()) {
    const ordered_json& f = j.at("feasibility");
    p.feasibility = FeasibilityResult{f.at("score").get<double>(),
                                      decision_from(f.at("decision").get<std::string>())};
  }
  return p;
}

ordered_json pair_json(const PairAnalysis& p) {
  ordered_json j = common_report_json(p.report);
  j["dominance"] = dominance_json(p.dominance);
  j["no_reuse_recommended"] = p.no_reuse_recommended;
  j["best_plan"] = plan_json(p.best_plan);
  return j;
}

PairAnalysis pair_from(const ordered_json& j) {
  PairAnalysis p;
  p.report = common_report_from(j);
  p.dominance = dominance_from(j.at("dominance"));
  p.no_reuse_recommended = j.at("no_reuse_recommended").get<bool>();
  p.best_plan = plan_from(j.at("best_plan"));
  return p;
}

ordered_json membership_json(const MembershipMatrix& m) {
  ordered_json cells = ordered_json::array();
  for (const auto& row : m.cells) {
    ordered_json r = ordered_json::array();
    for (const std::uint8_t cell : row) r.push_back(static_cast<int>(cell));
    cells.push_back(std::move(r));
  }
  ordered_json j;
  j["stage_ids"] = m.stage_ids;
  j["pipeline_ids"] = m.pipeline_ids;
  j["cells"] = std::move(cells);
  return j;
}

MembershipMatrix membership_from(const ordered_json& j) {
  MembershipMatrix m;
  m.stage_ids = j.at("stage_ids").get<std::vector<std::string>>();
  m.pipeline_ids = j.at("pipeline_ids").get<std::vector<std::string>>();
  for (const ordered_json& row : j.at("cells")) {
    std::vector<std::uint8_t> cells;
    cells.reserve(row.size());
    for (const ordered_json& cell : row) {
      cells.push_back(cell.get<int>() != 0 ? std::uint8_t{1} : std::uint8_t{0});
    }
    m.cells.push_back(std::move(cells));
  }
  return m;
}

std::string dump_document(const ordered_json& doc) { return doc.dump(2) + "\n"; }

ordered_json document_header(std::string_view kind) {
  ordered_json doc;
  doc["format_version"] = 1;
  doc["kind"] = std::string(kind);
  return doc;
}

}  // namespace

std::string emit_profiles_json(const std::vector<PipelineEnergyProfile>& profiles) {
  ordered_json doc = document_header("profiles");
  ordered_json arr = ordered_json::array();
  for (const PipelineEnergyProfile& p : profiles) arr.push_back(profile_json(p));
  doc["profiles"] = std::move(arr);
  return dump_document(doc);
}

std::string emit_analysis_json(const std::vector<AnalysisEntry>& entries) {
  ordered_json doc = document_header("analysis");
  ordered_json arr = ordered_json::array();
  for (const AnalysisEntry& e : entries) {
    ordered_json j = common_report_json(e.report);
    j["dominance"] = dominance_json(e.dominance);
    arr.push_back(std::move(j));
  }
  doc["pairs"] = std::move(arr);
  return dump_document(doc);
}

std::string emit_plan_json(const CommonStageReport& report, const DominanceResult& dominance,
                           const PlanSet& plans) {
  ordered_json doc = document_header("plan");
  doc["pipeline_a"] = report.pipeline_a;
  doc["pipeline_b"] = report.pipeline_b;
  doc["report"] = common_report_json(report);
  doc["dominance"] = dominance_json(dominance);
  doc["no_reuse_recommended"] = plans.no_reuse_recommended;
  ordered_json arr = ordered_json::array();
  for (const ReusePlan& p : plans.plans) arr.push_back(plan_json(p));
  doc["plans"] = std::move(arr);
  return dump_document(doc);
}

std::string emit_simulation_report(const SimulationReport& report) {
  ordered_json doc = document_header("simulation_report");
  ordered_json meta;
  meta["tool_version"] = std::string(kToolVersion);
  meta["seed"] = report.spec.seed;
  meta["spec"] = spec_json(report.spec);
  meta["coefficients"] = coefficients_json(report.coefficients);
  doc["metadata"] = std::move(meta);

  ordered_json catalog = ordered_json::array();
  for (const StageRecord& r : report.catalog.records()) catalog.push_back(record_json(r));
  doc["catalog"] = std::move(catalog);

  ordered_json pipelines = ordered_json::array();
  for (const Pipeline& p : report.pipelines) pipelines.push_back(pipeline_json(p));
  doc["pipelines"] = std::move(pipelines);

  ordered_json profiles = ordered_json::array();
  for (const PipelineEnergyProfile& p : report.profiles) profiles.push_back(profile_json(p));
  doc["profiles"] = std::move(profiles);

  ordered_json pairs = ordered_json::array();
  for (const PairAnalysis& p : report.pairs) pairs.push_back(pair_json(p));
  doc["pairs"] = std::move(pairs);

  doc["membership"] = membership_json(report.membership);
  return dump_document(doc);
}

SimulationReport parse_simulation_report(std::string_view json_text) {
  try {
    const ordered_json doc = ordered_json::parse(json_text);
    if (!doc.is_object() || doc.value("kind", std::string{}) != "simulation_report") {
      bad_document("expected a simulation_report document");
    }
    if (doc.at("format_version").get<int>() != 1) {
      bad_document(fmt::format("unsupported format_version {}", doc.at("format_version").dump()));
    }
    SimulationReport report;
    const ordered_json& meta = doc.at("metadata");
    report.spec = spec_from(meta.at("spec"));
    report.coefficients = coefficients_from(meta.at("coefficients"));

    std::vector<StageRecord> records;
    for (const ordered_json& r : doc.at("catalog")) records.push_back(record_from(r));
    report.catalog = validate_catalog(std::move(records));

    for (const ordered_json& p : doc.at("pipelines")) report.pipelines.push_back(pipeline_from(p));
    for (const ordered_json& p : doc.at("profiles")) report.profiles.push_back(profile_from(p));
    for (const ordered_json& p : doc.at("pairs")) report.pairs.push_back(pair_from(p));
    report.membership = membership_from(doc.at("membership"));
    return report;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::parse_error, fmt::format("malformed report: {}", e.what()));
  }
}

}  // namespace pipeprof
