// Batch front end: generate scenarios with captions, or re-validate
// existing scenario documents.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "animgram/animgram.hpp"
#include "animgram/paraphrase_http.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;

template <class T>
void override_if(const CLI::App& app, const char* flag, const std::optional<T>& value, T& target) {
  if (app.count(flag) > 0 && value) target = *value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate physics animation scenarios with captions."};
  app.set_version_flag("--version", animgram::kToolVersion);

  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> count, captions, steps, targets_min, targets_max, collisions_min, collisions_max, workers,
      max_iter;
  std::optional<double> synonym_rate, dt;
  std::optional<std::string> out_dir, provider, endpoint, catalog_path, lexicon_path;
  bool oracle = false, trace = false, provenance = false;
  std::vector<std::string> validate_paths;

  app.add_option("--config", config_path, "JSON run configuration; flags override its keys");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--count", count, "Number of scenarios");
  app.add_option("--out-dir", out_dir, "Output directory");
  app.add_option("--captions-per-scene", captions, "Captions written per scenario");
  app.add_option("--synonym-rate", synonym_rate, "Per-word synonym substitution probability");
  app.add_option("--paraphrase-provider", provider, "null, mock or http");
  app.add_option("--paraphrase-endpoint", endpoint, "URL for the http paraphrase provider");
  app.add_flag("--oracle,!--no-oracle", oracle, "Check motion semantics with the point-mass oracle");
  app.add_option("--dt", dt, "Oracle time step in seconds");
  app.add_option("--steps", steps, "Oracle step count");
  app.add_flag("--trace", trace, "Write a CSV motion trace per scenario when the oracle runs");
  app.add_flag("--caption-provenance", provenance, "Write caption provenance next to each caption file");
  app.add_option("--catalog", catalog_path, "Feature catalog JSON (default: built in)");
  app.add_option("--lexicon", lexicon_path, "Caption lexicon JSON (default: built in)");
  app.add_option("--targets-min", targets_min, "Fewest target objects");
  app.add_option("--targets-max", targets_max, "Most target objects");
  app.add_option("--collisions-min", collisions_min, "Fewest collision objects");
  app.add_option("--collisions-max", collisions_max, "Most collision objects");
  app.add_option("--max-iter", max_iter, "Resampling iteration budget");
  app.add_option("--workers", workers, "Worker threads");
  app.add_option("--validate", validate_paths, "Validate scenario files or directories instead of generating")
      ->expected(0, -1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  animgram::RunConfig cfg;
  try {
    if (config_path) cfg = animgram::load_config_file(*config_path);
    override_if(app, "--seed", seed, cfg.seed);
    override_if(app, "--count", count, cfg.count);
    if (app.count("--out-dir") && out_dir) cfg.out_dir = *out_dir;
    override_if(app, "--captions-per-scene", captions, cfg.captions_per_scene);
    override_if(app, "--synonym-rate", synonym_rate, cfg.synonym_rate);
    override_if(app, "--paraphrase-provider", provider, cfg.paraphrase.provider);
    override_if(app, "--paraphrase-endpoint", endpoint, cfg.paraphrase.endpoint);
    if (app.count("--oracle") || app.count("--no-oracle")) cfg.oracle = oracle;
    override_if(app, "--dt", dt, cfg.oracle_settings.dt);
    override_if(app, "--steps", steps, cfg.oracle_settings.steps);
    if (trace) cfg.trace = true;
    if (provenance) cfg.caption_provenance = true;
    if (app.count("--catalog") && catalog_path) cfg.catalog = *catalog_path;
    if (app.count("--lexicon") && lexicon_path) cfg.lexicon = *lexicon_path;
    override_if(app, "--targets-min", targets_min, cfg.generation.limits.targets_min);
    override_if(app, "--targets-max", targets_max, cfg.generation.limits.targets_max);
    override_if(app, "--collisions-min", collisions_min, cfg.generation.limits.collisions_min);
    override_if(app, "--collisions-max", collisions_max, cfg.generation.limits.collisions_max);
    override_if(app, "--max-iter", max_iter, cfg.generation.max_iter);
    override_if(app, "--workers", workers, cfg.workers);
    animgram::check_config(cfg);
  } catch (const animgram::Error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  }

  std::optional<animgram::Catalog> loaded_catalog;
  std::optional<animgram::Lexicon> loaded_lexicon;
  try {
    if (cfg.catalog) loaded_catalog = animgram::Catalog::load(*cfg.catalog);
    if (cfg.lexicon) loaded_lexicon = animgram::Lexicon::load(*cfg.lexicon);
  } catch (const animgram::Error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitConfig;
  }
  const animgram::Catalog& catalog = loaded_catalog ? *loaded_catalog : animgram::default_catalog();
  const animgram::Lexicon& lexicon = loaded_lexicon ? *loaded_lexicon : animgram::default_lexicon();

  if (app.count("--validate")) {
    std::vector<std::filesystem::path> paths;
    for (const auto& p : validate_paths)
      if (!p.empty()) paths.emplace_back(p);
    bool all_ok = true;
    for (const auto& v : animgram::validate_files(paths, catalog)) {
      all_ok = all_ok && v.ok;
      std::cout << (v.ok ? "PASS " : "FAIL ") << v.path << "\n";
      for (const auto& p : v.problems) std::cout << "  " << p << "\n";
    }
    return all_ok ? kExitOk : kExitCheckFailed;
  }

  std::shared_ptr<animgram::ParaphraseProvider> paraphraser;
  try {
    if (cfg.paraphrase.provider == "http")
      paraphraser = std::make_shared<animgram::HttpParaphraser>(cfg.paraphrase.endpoint,
                                                                std::max(1, cfg.paraphrase.timeout_ms / 1000));
    else
      paraphraser = animgram::builtin_provider(cfg.paraphrase.provider);
  } catch (const animgram::Error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  }

  animgram::RunManifest manifest;
  try {
    manifest = animgram::generate_batch(cfg, catalog, lexicon, paraphraser);
  } catch (const animgram::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  std::size_t invalid = 0, oracle_failed = 0;
  for (const auto& r : manifest.records) {
    if (!r.generated) {
      std::cerr << "scenario " << r.index << " failed: " << r.error << "\n";
      continue;
    }
    if (!r.validation_ok) ++invalid;
    if (r.oracle && !r.oracle->ok) ++oracle_failed;
  }
  std::cerr << manifest.generated() << "/" << manifest.records.size() << " scenarios generated, " << invalid
            << " failed validation, " << oracle_failed << " failed the motion oracle\n";
  return manifest.any_check_failed() ? kExitCheckFailed : kExitOk;
}
