#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "animgram/caption.hpp"
#include "animgram/catalog.hpp"
#include "animgram/error.hpp"
#include "animgram/lexicon.hpp"
#include "animgram/motion.hpp"
#include "animgram/scenario.hpp"
#include "animgram/scenario_io.hpp"
#include "json.hpp"

namespace animgram {

inline constexpr const char* kToolVersion = "0.1.0";

/// Bad run configuration: unknown key, wrong type, out-of-range value or
/// missing input file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct ParaphraseConfig {
  std::string provider = "null";  // null | mock | http
  std::string endpoint;
  std::vector<std::string> pivots = default_pivot_languages();
  int timeout_ms = 5000;
  friend bool operator==(const ParaphraseConfig&, const ParaphraseConfig&) = default;
};

struct RunConfig {
  std::uint64_t seed = 42;
  int count = 1;
  std::filesystem::path out_dir = "out";
  GenerationSettings generation;
  int captions_per_scene = 5;
  double synonym_rate = 0.3;
  ParaphraseConfig paraphrase;
  bool oracle = false;
  OracleSettings oracle_settings;
  bool trace = false;               // per-scenario CSV trace when the oracle runs
  bool caption_provenance = false;  // per-scenario caption provenance sidecar
  std::optional<std::filesystem::path> catalog;
  std::optional<std::filesystem::path> lexicon;
  int workers = 1;
};

/// Throws ConfigError on the first violated precondition.
inline void check_config(const RunConfig& c) {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (c.count < 1) fail("count must be at least 1");
  if (c.workers < 1) fail("workers must be at least 1");
  if (!c.generation.limits.valid()) fail("object count limits are inconsistent");
  if (!c.generation.dynamics.valid()) fail("dynamics settings are out of range");
  if (c.generation.max_iter < 1) fail("max-iter must be at least 1");
  if (c.captions_per_scene < 0) fail("captions-per-scene must be non-negative");
  if (!(c.synonym_rate >= 0.0 && c.synonym_rate <= 1.0)) fail("synonym-rate must lie in [0, 1]");
  if (!(c.oracle_settings.dt > 0.0)) fail("dt must be positive");
  if (c.oracle_settings.steps < 1) fail("steps must be at least 1");
  const auto& p = c.paraphrase.provider;
  if (p != "null" && p != "mock" && p != "http") fail("unknown paraphrase provider '" + p + "'");
  if (p == "http" && c.paraphrase.endpoint.empty()) fail("the http paraphrase provider needs an endpoint");
  if (c.paraphrase.timeout_ms < 1) fail("paraphrase timeout must be positive");
  if (c.out_dir.empty()) fail("out-dir must not be empty");
  for (const auto* path : {&c.catalog, &c.lexicon})
    if (*path && !std::filesystem::is_regular_file(**path)) fail("no such file: " + (*path)->string());
}

/// Canonical JSON form; the config file uses the same keys.
inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j{{"seed", c.seed},
                   {"count", c.count},
                   {"out-dir", c.out_dir.generic_string()},
                   {"targets-min", c.generation.limits.targets_min},
                   {"targets-max", c.generation.limits.targets_max},
                   {"collisions-min", c.generation.limits.collisions_min},
                   {"collisions-max", c.generation.limits.collisions_max},
                   {"dynamics", to_json(c.generation.dynamics)},
                   {"max-iter", c.generation.max_iter},
                   {"captions-per-scene", c.captions_per_scene},
                   {"synonym-rate", c.synonym_rate},
                   {"paraphrase-provider", c.paraphrase.provider},
                   {"paraphrase-endpoint", c.paraphrase.endpoint},
                   {"paraphrase-pivots", c.paraphrase.pivots},
                   {"paraphrase-timeout-ms", c.paraphrase.timeout_ms},
                   {"oracle", c.oracle},
                   {"dt", c.oracle_settings.dt},
                   {"steps", c.oracle_settings.steps},
                   {"trace", c.trace},
                   {"caption-provenance", c.caption_provenance},
                   {"workers", c.workers}};
  j["catalog"] = c.catalog ? nlohmann::json(c.catalog->generic_string()) : nlohmann::json(nullptr);
  j["lexicon"] = c.lexicon ? nlohmann::json(c.lexicon->generic_string()) : nlohmann::json(nullptr);
  return j;
}

/// Overlays the keys present in `j` onto `base`. Unknown keys are errors.
inline RunConfig apply_config_json(RunConfig base, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("run configuration must be a JSON object");
  nlohmann::json merged = to_json(base);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!merged.contains(it.key())) throw ConfigError("unknown configuration key '" + it.key() + "'");
    if (it.key() == "dynamics") {
      if (!it.value().is_object()) throw ConfigError("'dynamics' must be an object");
      merged["dynamics"].merge_patch(it.value());
    } else {
      merged[it.key()] = it.value();
    }
  }
  RunConfig c;
  try {
    using R = detail::DocReader;
    c.seed = R::unsigned_int(merged.at("seed"), "/seed");
    c.count = R::integer(merged.at("count"), "/count");
    c.out_dir = R::string(merged.at("out-dir"), "/out-dir");
    c.generation.limits = grammar_limits_from_json(
        {{"targets_min", merged.at("targets-min")},
         {"targets_max", merged.at("targets-max")},
         {"collisions_min", merged.at("collisions-min")},
         {"collisions_max", merged.at("collisions-max")}},
        "");
    c.generation.dynamics = dynamics_config_from_json(merged.at("dynamics"), "/dynamics");
    c.generation.max_iter = R::integer(merged.at("max-iter"), "/max-iter");
    c.captions_per_scene = R::integer(merged.at("captions-per-scene"), "/captions-per-scene");
    c.synonym_rate = R::number(merged.at("synonym-rate"), "/synonym-rate");
    c.paraphrase.provider = R::string(merged.at("paraphrase-provider"), "/paraphrase-provider");
    c.paraphrase.endpoint = R::string(merged.at("paraphrase-endpoint"), "/paraphrase-endpoint");
    c.paraphrase.pivots.clear();
    for (const auto& p : R::array(merged.at("paraphrase-pivots"), "/paraphrase-pivots"))
      c.paraphrase.pivots.push_back(R::string(p, "/paraphrase-pivots"));
    c.paraphrase.timeout_ms = R::integer(merged.at("paraphrase-timeout-ms"), "/paraphrase-timeout-ms");
    if (!merged.at("oracle").is_boolean()) throw R::invalid("/oracle", "expected a boolean");
    c.oracle = merged.at("oracle").get<bool>();
    c.oracle_settings.dt = R::number(merged.at("dt"), "/dt");
    c.oracle_settings.steps = R::integer(merged.at("steps"), "/steps");
    for (const char* key : {"trace", "caption-provenance"})
      if (!merged.at(key).is_boolean()) throw R::invalid(std::string("/") + key, "expected a boolean");
    c.trace = merged.at("trace").get<bool>();
    c.caption_provenance = merged.at("caption-provenance").get<bool>();
    c.workers = R::integer(merged.at("workers"), "/workers");
    if (!merged.at("catalog").is_null()) c.catalog = R::string(merged.at("catalog"), "/catalog");
    if (!merged.at("lexicon").is_null()) c.lexicon = R::string(merged.at("lexicon"), "/lexicon");
  } catch (const DocumentError& e) {
    throw ConfigError(std::string("bad configuration value: ") + e.what());
  }
  return c;
}

inline RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open configuration file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return apply_config_json(std::move(base), j);
}

/// FNV-1a over the canonical configuration, leaving out settings that do
/// not affect output bytes.
inline std::string config_hash(const RunConfig& c) {
  nlohmann::json j = to_json(c);
  j.erase("out-dir");
  j.erase("workers");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Manifest

struct OracleRecord {
  bool ok = true;
  std::vector<PredicateResult> predicates;
};

struct ManifestRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;  // derived stream seed
  bool generated = false;
  std::string error;
  std::string scenario_file;
  std::string caption_file;
  std::string provenance_file;
  std::string trace_file;
  bool validation_ok = false;
  std::vector<std::string> validation_problems;
  std::optional<OracleRecord> oracle;

  bool failed_checks() const { return generated && (!validation_ok || (oracle && !oracle->ok)); }
};

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string config_hash;
  std::vector<ManifestRecord> records;

  std::size_t generated() const {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) { return r.generated; }));
  }
  bool any_check_failed() const {
    return std::any_of(records.begin(), records.end(), [](const auto& r) { return r.failed_checks(); });
  }
};

inline nlohmann::json to_json(const ManifestRecord& r, const RunManifest& m) {
  auto or_null = [](const std::string& s) { return s.empty() ? nlohmann::json(nullptr) : nlohmann::json(s); };
  nlohmann::json j{{"index", r.index},
                   {"seed", r.seed},
                   {"status", r.generated ? "generated" : "failed"},
                   {"scenario_file", or_null(r.scenario_file)},
                   {"caption_file", or_null(r.caption_file)},
                   {"tool_version", m.tool_version},
                   {"config_hash", m.config_hash}};
  if (!r.error.empty()) j["error"] = r.error;
  if (!r.provenance_file.empty()) j["provenance_file"] = r.provenance_file;
  if (!r.trace_file.empty()) j["trace_file"] = r.trace_file;
  if (r.generated) j["validation"] = {{"ok", r.validation_ok}, {"problems", r.validation_problems}};
  else j["validation"] = nullptr;
  if (r.oracle) {
    nlohmann::json preds = nlohmann::json::array();
    for (const auto& p : r.oracle->predicates) {
      nlohmann::json pj{{"name", p.name}, {"holds", p.holds}};
      if (p.failed_frame) pj["failed_frame"] = *p.failed_frame;
      preds.push_back(std::move(pj));
    }
    j["oracle"] = {{"ok", r.oracle->ok}, {"predicates", std::move(preds)}};
  } else {
    j["oracle"] = nullptr;
  }
  return j;
}

inline std::string manifest_lines(const RunManifest& m) {
  std::string out;
  for (const auto& r : m.records) out += to_json(r, m).dump() + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Generation

/// Writes `bytes` next to `path` and renames it into place, so a reader never
/// sees a partial file under the final name.
inline void write_atomic(const std::filesystem::path& path, const std::string& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".part";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string scenario_stem(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scenario_%06zu", index);
  return buf;
}

/// Everything one scenario contributes: its manifest record and its files.
struct ScenarioArtifacts {
  ManifestRecord record;
  std::vector<std::pair<std::string, std::string>> files;  // name, bytes
};

inline ScenarioArtifacts produce_scenario(std::size_t index, const RunConfig& cfg, const Catalog& catalog,
                                          const Lexicon& lexicon,
                                          const std::shared_ptr<ParaphraseProvider>& provider) {
  ScenarioArtifacts a;
  ManifestRecord& r = a.record;
  r.index = index;
  r.seed = derive_stream_seed(cfg.seed, index, StreamDomain::kScene);
  try {
    GenerationOutcome g = generate_scenario(cfg.seed, index, cfg.generation, catalog);
    if (!g.ok) {
      r.error = g.error;
      return a;
    }
    const Scenario& s = g.scenario;
    const ValidationReport report = validate(s, catalog);
    r.validation_ok = report.ok();
    r.validation_problems = report.problems();

    CaptionSettings cs;
    cs.per_scenario = cfg.captions_per_scene;
    cs.synonym_rate = cfg.synonym_rate;
    cs.provider = provider;
    cs.pivots = cfg.paraphrase.pivots;
    cs.timeout = std::chrono::milliseconds(cfg.paraphrase.timeout_ms);
    const std::vector<Caption> captions = caption_scenario(s, lexicon, cs);

    const std::string stem = scenario_stem(index);
    r.scenario_file = stem + ".tpa.json";
    r.caption_file = stem + ".captions.txt";
    a.files.emplace_back(r.scenario_file, serialize(s));
    std::string lines;
    for (const auto& c : captions) lines += c.text + "\n";
    a.files.emplace_back(r.caption_file, std::move(lines));
    if (cfg.caption_provenance) {
      nlohmann::json side = nlohmann::json::array();
      for (const auto& c : captions) side.push_back({{"text", c.text}, {"provenance", to_json(c.provenance)}});
      r.provenance_file = stem + ".captions.json";
      a.files.emplace_back(r.provenance_file, side.dump(2) + "\n");
    }
    if (cfg.oracle) {
      const MotionTrace trace = simulate(s, catalog, cfg.oracle_settings);
      const SemanticVerdict v = check_semantics(s.model, trace);
      r.oracle = OracleRecord{v.ok(), v.predicates};
      if (cfg.trace) {
        std::ostringstream csv;
        write_trace_csv(csv, trace);
        r.trace_file = stem + ".trace.csv";
        a.files.emplace_back(r.trace_file, csv.str());
      }
    }
    r.generated = true;
  } catch (const std::exception& e) {
    a.files.clear();
    r = ManifestRecord{};
    r.index = index;
    r.seed = derive_stream_seed(cfg.seed, index, StreamDomain::kScene);
    r.error = e.what();
  }
  return a;
}

inline std::shared_ptr<ParaphraseProvider> builtin_provider(const std::string& name) {
  if (name == "null") return nullptr;
  if (name == "mock") return std::make_shared<UppercaseParaphraser>();
  throw ConfigError("paraphrase provider '" + name + "' must be supplied by the caller");
}

/// Generates `cfg.count` scenarios into `cfg.out_dir` and writes
/// manifest.jsonl. Output bytes do not depend on `cfg.workers`.
inline RunManifest generate_batch(const RunConfig& cfg, const Catalog& catalog, const Lexicon& lexicon,
                                  std::shared_ptr<ParaphraseProvider> provider = nullptr) {
  check_config(cfg);
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec || !fs::is_directory(cfg.out_dir)) throw Error("cannot create output directory " + cfg.out_dir.string());
  {
    const fs::path probe = cfg.out_dir / ".write_probe";
    std::ofstream out(probe);
    if (!out) throw Error("output directory is not writable: " + cfg.out_dir.string());
    out.close();
    fs::remove(probe, ec);
  }

  RunManifest manifest;
  manifest.config_hash = config_hash(cfg);
  manifest.records.resize(static_cast<std::size_t>(cfg.count));
  std::atomic<std::size_t> next{0};
  std::vector<std::string> write_errors(manifest.records.size());

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= manifest.records.size()) return;
      ScenarioArtifacts a = produce_scenario(i, cfg, catalog, lexicon, provider);
      try {
        for (const auto& [name, bytes] : a.files) write_atomic(cfg.out_dir / name, bytes);
      } catch (const std::exception& e) {
        write_errors[i] = e.what();
      }
      manifest.records[i] = std::move(a.record);
    }
  };
  const int n = std::min<int>(cfg.workers, cfg.count);
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < write_errors.size(); ++i)
    if (!write_errors[i].empty()) throw Error("writing scenario " + std::to_string(i) + ": " + write_errors[i]);

  write_atomic(cfg.out_dir / "manifest.jsonl", manifest_lines(manifest));
  return manifest;
}

// ---------------------------------------------------------------------------
// Re-validation of existing documents

struct FileVerdict {
  std::string path;
  bool ok = false;
  std::vector<std::string> problems;
};

inline std::vector<std::filesystem::path> expand_scenario_paths(const std::vector<std::filesystem::path>& paths) {
  namespace fs = std::filesystem;
  std::vector<fs::path> out;
  for (const auto& p : paths) {
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p, ec)) {
        const std::string name = e.path().filename().string();
        if (e.is_regular_file() && name.size() > 9 && name.ends_with(".tpa.json")) found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

/// Reads, parses and validates each document. Directories expand to the
/// scenario documents they contain. Failures are per file.
inline std::vector<FileVerdict> validate_files(const std::vector<std::filesystem::path>& paths,
                                               const Catalog& catalog) {
  std::vector<FileVerdict> out;
  for (const auto& p : expand_scenario_paths(paths)) {
    FileVerdict v;
    v.path = p.string();
    std::ifstream in(p, std::ios::binary);
    if (!in) {
      v.problems.push_back("cannot read file");
      out.push_back(std::move(v));
      continue;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
      const Scenario s = deserialize(ss.str());
      const ValidationReport r = validate(s, catalog);
      v.ok = r.ok();
      v.problems = r.problems();
    } catch (const std::exception& e) {
      v.problems.push_back(e.what());
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace animgram
