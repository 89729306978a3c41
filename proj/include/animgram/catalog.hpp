#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "animgram/error.hpp"
#include "animgram/grammar.hpp"
#include "animgram/rng.hpp"
#include "animgram/scene.hpp"
#include "json.hpp"

namespace animgram {

enum class ValueDomain { kScalar, kDirection, kPosition, kEnum };

/// Scalar bucket. The first bucket of a spec is closed [lo, hi]; the others
/// are (lo, hi], so a value on a boundary belongs to the lower bucket.
struct ScalarBucket {
  double lo = 0.0;
  double hi = 0.0;
};

enum class DirectionRegion { kCone, kHorizontal, kRemainder };

/// kCone: within half_angle of axis. kHorizontal: |y| < sin(half_angle) and
/// outside every cone. kRemainder: everything not claimed by another label.
struct DirectionBucket {
  DirectionRegion region = DirectionRegion::kCone;
  Vec3 axis;
  double half_angle_deg = 0.0;
};

enum class PositionRegion { kGround, kSky };

/// Ground: half y-extent <= y < sky threshold. Sky: y >= sky threshold,
/// where the threshold is sky_factor * the object's max extent.
struct PositionBucket {
  PositionRegion region = PositionRegion::kGround;
};

/// Enum bucket: the tokens the label may take. Empty means {label}.
struct EnumBucket {
  std::vector<std::string> tokens;
};

using Bucket = std::variant<ScalarBucket, DirectionBucket, PositionBucket, EnumBucket>;

struct LabelSpec {
  std::string label;
  bool sampleable = true;
  Bucket bucket;
};

struct Dependency {
  std::string controller;
  std::map<std::string, std::vector<std::string>> subsets;
};

/// Scene extents shared by every position feature (metres).
struct WorldBounds {
  double half_width = 10.0;
  double max_height = 20.0;
  double placement_half_width = 2.0;
  double sky_factor = 2.0;
  double sky_band = 3.0;
};

struct FeatureSpec {
  std::string attribute;
  std::string name;
  ValueDomain domain = ValueDomain::kScalar;
  std::string unit;
  bool integral = false;
  std::vector<LabelSpec> labels;
  std::optional<Dependency> dependency;
  WorldBounds world;

  const LabelSpec* find_label(std::string_view label) const {
    for (const auto& l : labels)
      if (l.label == label) return &l;
    return nullptr;
  }
  double range_lo() const { return std::get<ScalarBucket>(labels.front().bucket).lo; }
  double range_hi() const { return std::get<ScalarBucket>(labels.back().bucket).hi; }
};

struct PinnedFeature {
  std::string label;
  FeatureValue value;
};

struct AttributeSchema {
  std::string attribute;
  std::vector<std::string> features;
  std::map<std::string, PinnedFeature> pinned;
};

/// Per-object geometry needed by context-dependent buckets.
struct ValueContext {
  std::optional<Vec3> extents;  // full AABB extents, metres
};

/// Immutable feature catalog: specs, label buckets, dependencies, and the
/// per-node-kind schemas.
class Catalog {
 public:
  static Catalog from_json(const nlohmann::json& doc);
  static Catalog from_string(std::string_view text);
  static Catalog load(const std::filesystem::path& path);

  const std::string& version() const { return version_; }
  const WorldBounds& world() const { return world_; }

  const FeatureSpec* find_spec(std::string_view attribute, std::string_view feature) const {
    auto it = specs_.find(key(attribute, feature));
    return it == specs_.end() ? nullptr : &it->second;
  }
  const FeatureSpec& spec(std::string_view attribute, std::string_view feature) const {
    const FeatureSpec* s = find_spec(attribute, feature);
    if (!s) throw DataError("catalog has no feature " + key(attribute, feature));
    return *s;
  }
  const std::map<std::string, FeatureSpec>& specs() const { return specs_; }

  const std::vector<AttributeSchema>& schema(NodeKind kind) const {
    static const std::vector<AttributeSchema> empty;
    auto it = schemas_.find(kind);
    return it == schemas_.end() ? empty : it->second;
  }

  const PinnedFeature* pinned(NodeKind kind, std::string_view attribute, std::string_view feature) const {
    for (const auto& a : schema(kind)) {
      if (a.attribute != attribute) continue;
      auto it = a.pinned.find(std::string(feature));
      return it == a.pinned.end() ? nullptr : &it->second;
    }
    return nullptr;
  }

  Vec3 aspect(std::string_view shape_label) const {
    const Vec3* a = find_aspect(shape_label);
    if (!a) throw DataError("catalog has no aspect for shape " + std::string(shape_label));
    return *a;
  }
  const Vec3* find_aspect(std::string_view shape_label) const {
    auto it = aspects_.find(std::string(shape_label));
    return it == aspects_.end() ? nullptr : &it->second;
  }

  static std::string key(std::string_view attribute, std::string_view feature) {
    return std::string(attribute) + "/" + std::string(feature);
  }

 private:
  std::string version_;
  WorldBounds world_;
  std::map<std::string, Vec3> aspects_;
  std::map<std::string, FeatureSpec> specs_;
  std::map<NodeKind, std::vector<AttributeSchema>> schemas_;
};

// ---------------------------------------------------------------------------
// Bucket geometry
// ---------------------------------------------------------------------------

namespace detail {

inline bool scalar_in_bucket(const FeatureSpec& spec, std::size_t index, double v) {
  const auto& b = std::get<ScalarBucket>(spec.labels[index].bucket);
  if (std::isnan(v)) return false;
  if (index == 0) return v >= b.lo && v <= b.hi;
  return v > b.lo && v <= b.hi;
}

inline double sky_threshold(const FeatureSpec& spec, const Vec3& extents) {
  return spec.world.sky_factor * std::max({extents.x, extents.y, extents.z});
}

inline bool position_in_domain(const FeatureSpec& spec, const Vec3& p, const Vec3& extents) {
  const auto& w = spec.world;
  return std::abs(p.x) <= w.half_width && std::abs(p.z) <= w.half_width && p.y >= 0.5 * extents.y &&
         p.y <= w.max_height;
}

/// Index of the cone label nearest to `d`, if `d` lies inside it.
inline std::optional<std::size_t> nearest_cone(const FeatureSpec& spec, const Vec3& unit) {
  std::optional<std::size_t> best;
  double best_angle = 0.0;
  for (std::size_t i = 0; i < spec.labels.size(); ++i) {
    const auto& b = std::get<DirectionBucket>(spec.labels[i].bucket);
    if (b.region != DirectionRegion::kCone) continue;
    const double a = angle_between(unit, b.axis);
    if (a <= deg_to_rad(b.half_angle_deg) && (!best || a < best_angle)) {
      best = i;
      best_angle = a;
    }
  }
  return best;
}

inline std::optional<std::size_t> direction_label_index(const FeatureSpec& spec, const Vec3& d) {
  const double n = norm(d);
  if (!(n > 0.0) || !std::isfinite(n)) return std::nullopt;
  const Vec3 unit = d * (1.0 / n);
  if (auto cone = nearest_cone(spec, unit)) return cone;
  std::optional<std::size_t> remainder;
  for (std::size_t i = 0; i < spec.labels.size(); ++i) {
    const auto& b = std::get<DirectionBucket>(spec.labels[i].bucket);
    if (b.region == DirectionRegion::kHorizontal && std::abs(unit.y) < std::sin(deg_to_rad(b.half_angle_deg)))
      return i;
    if (b.region == DirectionRegion::kRemainder) remainder = i;
  }
  return remainder;
}

}  // namespace detail

/// Label whose bucket contains `value`, or nullopt when the value lies
/// outside the feature's declared range (or has the wrong type).
inline std::optional<std::string> find_label(const FeatureSpec& spec, const FeatureValue& value,
                                             const ValueContext& ctx = {}) {
  switch (spec.domain) {
    case ValueDomain::kScalar: {
      const double* v = std::get_if<double>(&value);
      if (!v) return std::nullopt;
      for (std::size_t i = 0; i < spec.labels.size(); ++i)
        if (detail::scalar_in_bucket(spec, i, *v)) return spec.labels[i].label;
      return std::nullopt;
    }
    case ValueDomain::kDirection: {
      const Vec3* v = std::get_if<Vec3>(&value);
      if (!v) return std::nullopt;
      auto i = detail::direction_label_index(spec, *v);
      if (!i) return std::nullopt;
      return spec.labels[*i].label;
    }
    case ValueDomain::kPosition: {
      const Vec3* p = std::get_if<Vec3>(&value);
      if (!p || !ctx.extents || !detail::position_in_domain(spec, *p, *ctx.extents)) return std::nullopt;
      const bool sky = p->y >= detail::sky_threshold(spec, *ctx.extents);
      for (const auto& l : spec.labels)
        if ((std::get<PositionBucket>(l.bucket).region == PositionRegion::kSky) == sky) return l.label;
      return std::nullopt;
    }
    case ValueDomain::kEnum: {
      const std::string* t = std::get_if<std::string>(&value);
      if (!t) return std::nullopt;
      for (const auto& l : spec.labels) {
        const auto& tokens = std::get<EnumBucket>(l.bucket).tokens;
        if (tokens.empty() ? *t == l.label : std::find(tokens.begin(), tokens.end(), *t) != tokens.end())
          return l.label;
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

/// Clamps a scalar into the feature's declared range; other domains pass through.
inline FeatureValue clamp_to_range(const FeatureSpec& spec, FeatureValue value) {
  if (spec.domain == ValueDomain::kScalar)
    if (double* v = std::get_if<double>(&value)) *v = std::clamp(*v, spec.range_lo(), spec.range_hi());
  return value;
}

/// The label whose bucket contains `value`. Throws when none does; callers
/// clamp noisy values into the declared range first.
inline std::string relabel_from_value(const FeatureSpec& spec, const FeatureValue& value,
                                      const ValueContext& ctx = {}) {
  auto label = find_label(spec, value, ctx);
  if (!label) throw Error("value outside the declared range of " + spec.attribute + "/" + spec.name);
  return *label;
}

inline bool value_in_label(const FeatureSpec& spec, std::string_view label, const FeatureValue& value,
                           const ValueContext& ctx = {}) {
  auto found = find_label(spec, value, ctx);
  return found && *found == label;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Labels the sampler may draw, honouring the dependency subset picked by
/// the controlling sibling. Throws SamplingError when the controller has
/// not been sampled yet.
inline std::vector<std::string> label_candidates(const FeatureSpec& spec, const Attribute& siblings) {
  std::vector<std::string> out;
  const std::vector<std::string>* subset = nullptr;
  if (spec.dependency) {
    const Feature* controller = siblings.find(spec.dependency->controller);
    if (!controller)
      throw SamplingError(spec.name + " sampled before its controller " + spec.dependency->controller);
    auto it = spec.dependency->subsets.find(controller->label);
    if (it == spec.dependency->subsets.end())
      throw SamplingError("no " + spec.name + " subset for " + spec.dependency->controller + "=" + controller->label);
    subset = &it->second;
  }
  for (const auto& l : spec.labels) {
    if (!l.sampleable) continue;
    if (subset && std::find(subset->begin(), subset->end(), l.label) == subset->end()) continue;
    out.push_back(l.label);
  }
  return out;
}

inline std::string sample_label(const FeatureSpec& spec, const Attribute& siblings, Rng& rng) {
  auto candidates = label_candidates(spec, siblings);
  if (candidates.empty()) throw SamplingError("no sampleable label for " + spec.name);
  if (candidates.size() == 1) return candidates.front();
  return candidates[rng.below(candidates.size())];
}

namespace detail {

inline double sample_scalar(const FeatureSpec& spec, std::size_t index, Rng& rng) {
  const auto& b = std::get<ScalarBucket>(spec.labels[index].bucket);
  if (spec.integral) {
    const auto first = static_cast<std::int64_t>(index == 0 ? std::ceil(b.lo) : std::floor(b.lo) + 1);
    const auto last = static_cast<std::int64_t>(std::floor(b.hi));
    return static_cast<double>(rng.between(first, last));
  }
  for (;;) {
    const double v = b.lo + (b.hi - b.lo) * rng.uniform_open();
    if (scalar_in_bucket(spec, index, v)) return v;
  }
}

inline Vec3 sample_direction(const FeatureSpec& spec, std::size_t index, Rng& rng) {
  const auto& b = std::get<DirectionBucket>(spec.labels[index].bucket);
  if (b.region == DirectionRegion::kCone) {
    for (;;) {
      Vec3 d = rng.in_cone(normalized(b.axis), deg_to_rad(b.half_angle_deg));
      if (direction_label_index(spec, d) == index) return d;
    }
  }
  const double band = b.region == DirectionRegion::kHorizontal ? std::sin(deg_to_rad(b.half_angle_deg)) : 1.0;
  for (;;) {
    // Uniform on the sphere restricted to |y| < band (uniform in y by
    // Archimedes' theorem), then rejection against the other labels.
    const double y = rng.uniform(-band, band);
    const double phi = rng.uniform(0.0, 2.0 * kPi);
    const double r = std::sqrt(std::max(0.0, 1.0 - y * y));
    const Vec3 d{r * std::cos(phi), y, r * std::sin(phi)};
    if (direction_label_index(spec, d) == index) return d;
  }
}

inline Vec3 sample_position(const FeatureSpec& spec, std::size_t index, const ValueContext& ctx, Rng& rng) {
  if (!ctx.extents) throw SamplingError("position sampled without object extents");
  const auto& w = spec.world;
  const Vec3& e = *ctx.extents;
  const double x = rng.uniform(-w.placement_half_width, w.placement_half_width);
  const double z = rng.uniform(-w.placement_half_width, w.placement_half_width);
  if (std::get<PositionBucket>(spec.labels[index].bucket).region == PositionRegion::kGround)
    return {x, 0.5 * e.y, z};
  const double lo = sky_threshold(spec, e);
  const double hi = std::min(lo + w.sky_band, w.max_height);
  return {x, rng.uniform(lo, hi), z};
}

}  // namespace detail

/// Draws a value inside the bucket of `label`.
inline FeatureValue sample_value(const FeatureSpec& spec, std::string_view label, Rng& rng,
                                 const ValueContext& ctx = {}) {
  std::size_t index = spec.labels.size();
  for (std::size_t i = 0; i < spec.labels.size(); ++i)
    if (spec.labels[i].label == label) index = i;
  if (index == spec.labels.size()) throw SamplingError("unknown label " + std::string(label) + " for " + spec.name);
  switch (spec.domain) {
    case ValueDomain::kScalar: return detail::sample_scalar(spec, index, rng);
    case ValueDomain::kDirection: return detail::sample_direction(spec, index, rng);
    case ValueDomain::kPosition: return detail::sample_position(spec, index, ctx, rng);
    case ValueDomain::kEnum: {
      const auto& tokens = std::get<EnumBucket>(spec.labels[index].bucket).tokens;
      if (tokens.empty()) return std::string(label);
      return tokens[rng.below(tokens.size())];
    }
  }
  return 0.0;
}

/// Full AABB extents of an object: Size (max extent) scaled by the shape's
/// aspect ratios.
inline std::optional<Vec3> object_extents(const SceneNode& node, const Catalog& catalog) {
  const Feature* shape = node.feature(names::kShape, names::kShapeFeature);
  const Feature* size = node.feature(names::kShape, names::kSize);
  if (!shape || !size) return std::nullopt;
  const double* s = std::get_if<double>(&size->value);
  const Vec3* aspect = catalog.find_aspect(shape->label);
  if (!s || !aspect) return std::nullopt;
  return *aspect * *s;
}

inline ValueContext value_context(const SceneNode& node, const Catalog& catalog) {
  return {is_object(node.kind) ? object_extents(node, catalog) : std::nullopt};
}

/// Top-down label then value sampling for every attribute-bearing node.
/// Within an attribute, features are visited in schema order, so every
/// controlling feature precedes its dependents.
inline void sample_features(ParseTree& tree, const Catalog& catalog, Rng& rng) {
  for (auto& node : tree.nodes) {
    const auto& schema = catalog.schema(node.kind);
    node.attributes.clear();
    for (const auto& attr_schema : schema) {
      node.attributes.push_back({attr_schema.attribute, {}});
      for (const auto& fname : attr_schema.features) {
        const FeatureSpec& spec = catalog.spec(attr_schema.attribute, fname);
        Attribute& attr = node.attributes.back();
        Feature f;
        f.name = fname;
        f.unit = spec.unit;
        auto pin = attr_schema.pinned.find(fname);
        if (pin != attr_schema.pinned.end()) {
          f.label = pin->second.label;
          f.value = pin->second.value;
        } else {
          f.label = sample_label(spec, attr, rng);
          f.value = sample_value(spec, f.label, rng, value_context(node, catalog));
        }
        attr.features.push_back(std::move(f));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

namespace detail {

inline Vec3 vec3_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw DataError("expected a 3-element array");
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

inline ValueDomain domain_from_string(const std::string& s) {
  if (s == "scalar") return ValueDomain::kScalar;
  if (s == "direction") return ValueDomain::kDirection;
  if (s == "position") return ValueDomain::kPosition;
  if (s == "enum") return ValueDomain::kEnum;
  throw DataError("unknown value domain " + s);
}

inline LabelSpec label_from_json(ValueDomain domain, const nlohmann::json& j) {
  LabelSpec l;
  l.label = j.at("label").get<std::string>();
  l.sampleable = j.value("sampleable", true);
  switch (domain) {
    case ValueDomain::kScalar:
      l.bucket = ScalarBucket{j.at("lo").get<double>(), j.at("hi").get<double>()};
      break;
    case ValueDomain::kDirection: {
      DirectionBucket b;
      const std::string region = j.value("region", std::string("cone"));
      if (region == "cone") {
        b.region = DirectionRegion::kCone;
        b.axis = vec3_from_json(j.at("axis"));
        if (!(norm(b.axis) > 0.0)) throw DataError("zero cone axis for " + l.label);
        b.axis = normalized(b.axis);
        b.half_angle_deg = j.at("half_angle").get<double>();
      } else if (region == "horizontal") {
        b.region = DirectionRegion::kHorizontal;
        b.half_angle_deg = j.at("half_angle").get<double>();
      } else if (region == "remainder") {
        b.region = DirectionRegion::kRemainder;
      } else {
        throw DataError("unknown direction region " + region);
      }
      l.bucket = b;
      break;
    }
    case ValueDomain::kPosition: {
      const std::string region = j.at("region").get<std::string>();
      if (region == "ground") l.bucket = PositionBucket{PositionRegion::kGround};
      else if (region == "sky") l.bucket = PositionBucket{PositionRegion::kSky};
      else throw DataError("unknown position region " + region);
      break;
    }
    case ValueDomain::kEnum: {
      EnumBucket b;
      if (j.contains("tokens")) b.tokens = j.at("tokens").get<std::vector<std::string>>();
      l.bucket = b;
      break;
    }
  }
  return l;
}

inline void check_spec(const FeatureSpec& spec) {
  const std::string where = spec.attribute + "/" + spec.name;
  if (spec.labels.empty()) throw DataError(where + ": no labels");
  for (std::size_t i = 0; i < spec.labels.size(); ++i)
    for (std::size_t j = i + 1; j < spec.labels.size(); ++j)
      if (spec.labels[i].label == spec.labels[j].label) throw DataError(where + ": duplicate label");
  switch (spec.domain) {
    case ValueDomain::kScalar:
      for (std::size_t i = 0; i < spec.labels.size(); ++i) {
        const auto& b = std::get<ScalarBucket>(spec.labels[i].bucket);
        if (!(b.lo < b.hi)) throw DataError(where + ": empty bucket " + spec.labels[i].label);
        if (i + 1 < spec.labels.size() && std::get<ScalarBucket>(spec.labels[i + 1].bucket).lo != b.hi)
          throw DataError(where + ": buckets must be contiguous and ascending");
      }
      break;
    case ValueDomain::kDirection: {
      int remainder = 0;
      for (const auto& l : spec.labels)
        if (std::get<DirectionBucket>(l.bucket).region == DirectionRegion::kRemainder) ++remainder;
      if (remainder != 1) throw DataError(where + ": need exactly one remainder direction label");
      break;
    }
    case ValueDomain::kPosition: {
      int ground = 0, sky = 0;
      for (const auto& l : spec.labels)
        (std::get<PositionBucket>(l.bucket).region == PositionRegion::kGround ? ground : sky)++;
      if (ground != 1 || sky != 1) throw DataError(where + ": need one ground and one sky label");
      break;
    }
    case ValueDomain::kEnum: {
      std::vector<std::string> seen;
      for (const auto& l : spec.labels) {
        const auto& t = std::get<EnumBucket>(l.bucket).tokens;
        if (t.empty()) seen.push_back(l.label);
        else seen.insert(seen.end(), t.begin(), t.end());
      }
      std::sort(seen.begin(), seen.end());
      if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
        throw DataError(where + ": enum tokens must be unique");
      break;
    }
  }
}

}  // namespace detail

inline Catalog Catalog::from_json(const nlohmann::json& doc) {
  Catalog c;
  try {
    c.version_ = doc.at("catalog_version").get<std::string>();
    if (c.version_ != "1.0") throw DataError("unsupported catalog_version " + c.version_);
    const auto& w = doc.at("world");
    c.world_ = {w.at("half_width").get<double>(), w.at("max_height").get<double>(),
                w.at("placement_half_width").get<double>(), w.at("sky_factor").get<double>(),
                w.at("sky_band").get<double>()};
    for (const auto& [shape, aspect] : doc.at("shape_aspect").items())
      c.aspects_[shape] = detail::vec3_from_json(aspect);

    for (const auto& jf : doc.at("features")) {
      FeatureSpec s;
      s.attribute = jf.at("attribute").get<std::string>();
      s.name = jf.at("name").get<std::string>();
      s.domain = detail::domain_from_string(jf.at("domain").get<std::string>());
      s.unit = jf.value("unit", std::string());
      s.integral = jf.value("integral", false);
      s.world = c.world_;
      for (const auto& jl : jf.at("labels")) s.labels.push_back(detail::label_from_json(s.domain, jl));
      if (jf.contains("depends_on")) {
        Dependency d;
        d.controller = jf.at("depends_on").get<std::string>();
        d.subsets = jf.at("subsets").get<std::map<std::string, std::vector<std::string>>>();
        for (const auto& [ctrl, subset] : d.subsets)
          for (const auto& l : subset)
            if (!s.find_label(l)) throw DataError(s.name + " subset names unknown label " + l);
        s.dependency = std::move(d);
      }
      detail::check_spec(s);
      const std::string k = key(s.attribute, s.name);
      if (c.specs_.count(k)) throw DataError("duplicate feature " + k);
      c.specs_.emplace(k, std::move(s));
    }

    for (const auto& [kind_name, jschema] : doc.at("schemas").items()) {
      auto kind = node_kind_from_string(kind_name);
      if (!kind) throw DataError("schema for unknown node kind " + kind_name);
      std::vector<AttributeSchema> attrs;
      for (const auto& ja : jschema) {
        AttributeSchema a;
        a.attribute = ja.at("attribute").get<std::string>();
        a.features = ja.at("features").get<std::vector<std::string>>();
        for (std::size_t i = 0; i < a.features.size(); ++i) {
          const FeatureSpec& s = c.spec(a.attribute, a.features[i]);
          if (s.dependency) {
            auto ctrl = std::find(a.features.begin(), a.features.begin() + static_cast<long>(i),
                                  s.dependency->controller);
            if (ctrl == a.features.begin() + static_cast<long>(i))
              throw DataError(s.name + " must follow its controller in " + kind_name + "/" + a.attribute);
            const FeatureSpec& cs = c.spec(a.attribute, s.dependency->controller);
            for (const auto& cl : cs.labels)
              if (!s.dependency->subsets.count(cl.label))
                throw DataError(s.name + " has no subset for " + cs.name + "=" + cl.label);
          }
        }
        if (ja.contains("pinned")) {
          for (const auto& [fname, jp] : ja.at("pinned").items()) {
            const FeatureSpec& s = c.spec(a.attribute, fname);
            PinnedFeature p;
            p.label = jp.at("label").get<std::string>();
            const auto& jv = jp.at("value");
            if (jv.is_number()) p.value = jv.get<double>();
            else if (jv.is_string()) p.value = jv.get<std::string>();
            else p.value = detail::vec3_from_json(jv);
            if (s.domain != ValueDomain::kPosition && !value_in_label(s, p.label, p.value))
              throw DataError("pinned value for " + fname + " is outside label " + p.label);
            a.pinned.emplace(fname, std::move(p));
          }
        }
        attrs.push_back(std::move(a));
      }
      const auto expected = node_attribute_schema(*kind);
      bool ok = attrs.size() == expected.size();
      for (std::size_t i = 0; ok && i < attrs.size(); ++i) ok = attrs[i].attribute == expected[i];
      if (!ok) throw DataError("schema for " + kind_name + " does not list the expected attributes");
      c.schemas_[*kind] = std::move(attrs);
    }
    for (NodeKind k : {NodeKind::kEnvironment, NodeKind::kRender, NodeKind::kTargetObject,
                       NodeKind::kCollisionObject})
      if (!c.schemas_.count(k)) throw DataError("catalog lacks a schema for " + std::string(to_string(k)));
    const FeatureSpec& shape = c.spec(names::kShape, names::kShapeFeature);
    for (const auto& l : shape.labels)
      if (!c.aspects_.count(l.label)) throw DataError("no shape_aspect for " + l.label);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("catalog: ") + e.what());
  }
  return c;
}

inline Catalog Catalog::from_string(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("catalog: ") + e.what());
  }
  return from_json(doc);
}

inline Catalog Catalog::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open catalog file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return from_string(ss.str());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace animgram
