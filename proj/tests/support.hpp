#pragma once

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "animgram/animgram.hpp"

namespace animgram::testing {

inline const Catalog& catalog() { return default_catalog(); }
inline const Lexicon& lexicon() { return default_lexicon(); }

/// Tree with fixed object counts and freshly sampled features.
inline ParseTree sampled_tree(std::uint64_t seed, int targets, int collisions) {
  Rng rng(seed);
  ParseTree tree = build_scene_tree(targets, collisions, seed);
  sample_features(tree, catalog(), rng);
  return tree;
}

/// A model of `kind` with roles drawn from `tree` and the given relation.
/// Needs enough objects for the roles; returns false otherwise.
inline bool force_model(const ParseTree& tree, DynamicKind kind, RelationKind relation, Rng& rng,
                        DynamicModel& out) {
  const auto targets = tree.targets();
  const auto objects = tree.objects();
  DynamicModel m;
  m.kind = kind;
  if (kind == DynamicKind::kThrow) m.throw_variant = rng.coin() ? ThrowVariant::kUp : ThrowVariant::kDown;
  m.subject = targets[rng.below(targets.size())];
  if (is_multi_object(kind)) {
    std::vector<NodeId> pool;
    for (NodeId id : kind == DynamicKind::kStrike ? targets : objects)
      if (id != m.subject) pool.push_back(id);
    if (pool.empty()) return false;
    m.objective = pool[rng.below(pool.size())];
  }
  if (relation != RelationKind::kNone) {
    const auto spare = spare_objects(m, tree);
    if (spare.empty()) return false;
    m.relation = {relation, spare[rng.below(spare.size())]};
  }
  out = m;
  return true;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Fresh empty directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("animgram_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// File name -> bytes for every regular file in `dir`.
inline std::map<std::string, std::string> directory_bytes(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file()) out[e.path().filename().string()] = read_file(e.path());
  return out;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

/// Critical D for two samples of sizes n and m at the given c(alpha)
/// (1.628 for alpha = 0.01).
inline double ks_critical(std::size_t n, std::size_t m, double c_alpha) {
  return c_alpha * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * static_cast<double>(m)));
}

}  // namespace animgram::testing
