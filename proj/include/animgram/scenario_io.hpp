#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "animgram/catalog.hpp"
#include "animgram/constraint.hpp"
#include "animgram/dynamics.hpp"
#include "animgram/error.hpp"
#include "animgram/grammar.hpp"
#include "animgram/scenario.hpp"
#include "animgram/scene.hpp"
#include "json.hpp"

namespace animgram {

/// Structured failure from deserialize. `offset` is the byte position for
/// parse errors; `path` is a JSON pointer for field errors.
class DocumentError : public Error {
 public:
  enum class Kind { kParse, kVersion, kMissingField, kInvalidValue };

  DocumentError(Kind kind, std::string message, std::string path = {}, std::size_t offset = 0)
      : Error(describe(kind, message, path, offset)), kind_(kind), path_(std::move(path)), offset_(offset) {}

  Kind kind() const { return kind_; }
  const std::string& path() const { return path_; }
  std::size_t offset() const { return offset_; }

 private:
  static std::string describe(Kind kind, const std::string& message, const std::string& path, std::size_t offset) {
    switch (kind) {
      case Kind::kParse: return "parse error at byte " + std::to_string(offset) + ": " + message;
      case Kind::kVersion: return "unsupported schema version: " + message;
      case Kind::kMissingField: return "missing field " + path;
      case Kind::kInvalidValue: return "invalid value at " + path + ": " + message;
    }
    return message;
  }

  Kind kind_;
  std::string path_;
  std::size_t offset_;
};

// ---------------------------------------------------------------------------
// Config blocks, shared with the run configuration file
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const GrammarLimits& g) {
  return {{"targets_min", g.targets_min},
          {"targets_max", g.targets_max},
          {"collisions_min", g.collisions_min},
          {"collisions_max", g.collisions_max}};
}

inline nlohmann::json to_json(const DynamicsConfig& d) {
  return {{"theta0_deg", d.theta0_deg},
          {"theta1_deg", d.theta1_deg},
          {"alpha", d.alpha},
          {"v_min", d.v_min},
          {"v_small", d.v_small},
          {"v_large", d.v_large},
          {"gap_max", d.gap_max},
          {"lift_factor", d.lift_factor},
          {"sky_factor", d.sky_factor},
          {"relation_probabilities", {{"none", d.p_none}, {"from", d.p_from}, {"to", d.p_to}}}};
}

namespace detail {

/// Typed access into a JSON document that reports failures as
/// DocumentError with a JSON-pointer path.
class DocReader {
 public:
  static const nlohmann::json& field(const nlohmann::json& obj, std::string_view key, const std::string& path) {
    if (!obj.is_object()) throw DocumentError(DocumentError::Kind::kInvalidValue, "expected an object", path);
    auto it = obj.find(std::string(key));
    if (it == obj.end()) throw DocumentError(DocumentError::Kind::kMissingField, "", path + "/" + std::string(key));
    return *it;
  }
  static const nlohmann::json* optional(const nlohmann::json& obj, std::string_view key) {
    auto it = obj.find(std::string(key));
    return it == obj.end() ? nullptr : &*it;
  }
  static double number(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number()) throw invalid(path, "expected a number");
    return j.get<double>();
  }
  static std::uint64_t unsigned_int(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
      throw invalid(path, "expected a non-negative integer");
    return j.get<std::uint64_t>();
  }
  static int integer(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number_integer()) throw invalid(path, "expected an integer");
    const auto v = j.get<std::int64_t>();
    if (v < INT32_MIN || v > INT32_MAX) throw invalid(path, "integer out of range");
    return static_cast<int>(v);
  }
  static std::string string(const nlohmann::json& j, const std::string& path) {
    if (!j.is_string()) throw invalid(path, "expected a string");
    return j.get<std::string>();
  }
  static const nlohmann::json& array(const nlohmann::json& j, const std::string& path) {
    if (!j.is_array()) throw invalid(path, "expected an array");
    return j;
  }
  static Vec3 vec3(const nlohmann::json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 3) throw invalid(path, "expected a 3-element array");
    return {number(j[0], path + "/0"), number(j[1], path + "/1"), number(j[2], path + "/2")};
  }
  static DocumentError invalid(const std::string& path, const std::string& why) {
    return DocumentError(DocumentError::Kind::kInvalidValue, why, path);
  }

  // Convenience: field + typed read in one call.
  static double number_at(const nlohmann::json& o, std::string_view k, const std::string& p) {
    return number(field(o, k, p), p + "/" + std::string(k));
  }
  static int integer_at(const nlohmann::json& o, std::string_view k, const std::string& p) {
    return integer(field(o, k, p), p + "/" + std::string(k));
  }
  static std::string string_at(const nlohmann::json& o, std::string_view k, const std::string& p) {
    return string(field(o, k, p), p + "/" + std::string(k));
  }
};

inline nlohmann::json node_to_json(const SceneNode& n) {
  nlohmann::json attrs = nlohmann::json::array();
  for (const auto& a : n.attributes) {
    nlohmann::json feats = nlohmann::json::array();
    for (const auto& f : a.features)
      feats.push_back({{"name", f.name}, {"label", f.label}, {"value", feature_value_to_json(f.value)}, {"unit", f.unit}});
    attrs.push_back({{"name", a.name}, {"features", std::move(feats)}});
  }
  return {{"id", n.id.value}, {"kind", std::string(to_string(n.kind))}, {"attributes", std::move(attrs)}};
}

inline nlohmann::json operand_to_json(const OperandRef& op) {
  if (const double* d = std::get_if<double>(&op)) return {{"scalar", *d}};
  if (const Vec3* v = std::get_if<Vec3>(&op)) return {{"vector", {v->x, v->y, v->z}}};
  const auto& p = std::get<FeaturePath>(op);
  return {{"node", p.node.value}, {"attribute", p.attribute}, {"feature", p.feature}};
}

inline nlohmann::json constraint_to_json(const Constraint& c) {
  nlohmann::json ops = nlohmann::json::array();
  for (const auto& op : c.operands) ops.push_back(operand_to_json(op));
  nlohmann::json j = {{"kind", std::string(to_string(c.kind))}, {"operands", std::move(ops)}, {"criteria", c.criteria}};
  if (c.kind == ConstraintKind::kSimilarDir) j["theta"] = c.theta_deg;
  if (!c.origin.empty()) j["origin"] = c.origin;
  return j;
}

inline nlohmann::json model_to_json(const DynamicModel& m) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(m.kind));
  if (m.throw_variant) j["throw_variant"] = std::string(to_string(*m.throw_variant));
  j["subject"] = m.subject.value;
  if (m.objective) j["objective"] = m.objective->value;
  j["relation"] = {{"kind", std::string(to_string(m.relation.kind))}};
  if (m.relation.target) j["relation"]["target"] = m.relation.target->value;
  if (m.jump_encoding) j["jump_encoding"] = std::string(to_string(*m.jump_encoding));
  nlohmann::json noise = nlohmann::json::array();
  for (const auto& n : m.noise) noise.push_back({{"name", n.name}, {"value", n.value}});
  j["noise"] = std::move(noise);
  if (m.contact_point) j["contact_point"] = {m.contact_point->x, m.contact_point->y, m.contact_point->z};
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : m.constraints) cs.push_back(constraint_to_json(c));
  j["constraints"] = std::move(cs);
  return j;
}

}  // namespace detail

inline nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json j;
  j["schema_version"] = s.schema_version;
  j["seed"] = {{"master", s.master_seed}, {"stream", s.stream}};
  j["config"] = {{"grammar", to_json(s.settings.limits)},
                 {"dynamics", to_json(s.settings.dynamics)},
                 {"max_iter", s.settings.max_iter}};
  nlohmann::json targets = nlohmann::json::array(), collisions = nlohmann::json::array();
  for (const auto& n : s.tree.nodes) {
    switch (n.kind) {
      case NodeKind::kEnvironment: j["environment"] = detail::node_to_json(n); break;
      case NodeKind::kRender: j["render"] = detail::node_to_json(n); break;
      case NodeKind::kTargetObject: targets.push_back(detail::node_to_json(n)); break;
      case NodeKind::kCollisionObject: collisions.push_back(detail::node_to_json(n)); break;
      default: break;
    }
  }
  j["targets"] = std::move(targets);
  j["collisions"] = std::move(collisions);
  j["dynamic_model"] = detail::model_to_json(s.model);
  return j;
}

/// Canonical bytes: sorted keys, two-space indent, shortest round-trip
/// doubles, trailing newline.
inline std::string serialize(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Reading
// ---------------------------------------------------------------------------

inline GrammarLimits grammar_limits_from_json(const nlohmann::json& j, const std::string& path) {
  using R = detail::DocReader;
  GrammarLimits g;
  g.targets_min = R::integer_at(j, "targets_min", path);
  g.targets_max = R::integer_at(j, "targets_max", path);
  g.collisions_min = R::integer_at(j, "collisions_min", path);
  g.collisions_max = R::integer_at(j, "collisions_max", path);
  return g;
}

inline DynamicsConfig dynamics_config_from_json(const nlohmann::json& j, const std::string& path) {
  using R = detail::DocReader;
  DynamicsConfig d;
  d.theta0_deg = R::number_at(j, "theta0_deg", path);
  d.theta1_deg = R::number_at(j, "theta1_deg", path);
  d.alpha = R::number_at(j, "alpha", path);
  d.v_min = R::number_at(j, "v_min", path);
  d.v_small = R::number_at(j, "v_small", path);
  d.v_large = R::number_at(j, "v_large", path);
  d.gap_max = R::number_at(j, "gap_max", path);
  d.lift_factor = R::number_at(j, "lift_factor", path);
  d.sky_factor = R::number_at(j, "sky_factor", path);
  const auto& rp = R::field(j, "relation_probabilities", path);
  const std::string rpath = path + "/relation_probabilities";
  d.p_none = R::number_at(rp, "none", rpath);
  d.p_from = R::number_at(rp, "from", rpath);
  d.p_to = R::number_at(rp, "to", rpath);
  return d;
}

namespace detail {

inline void read_node_attributes(SceneNode& node, const nlohmann::json& j, const std::string& path) {
  using R = DocReader;
  const auto id = R::unsigned_int(R::field(j, "id", path), path + "/id");
  if (id != node.id.value) throw R::invalid(path + "/id", "expected id " + std::to_string(node.id.value));
  const std::string kind = R::string_at(j, "kind", path);
  if (kind != to_string(node.kind)) throw R::invalid(path + "/kind", "expected " + std::string(to_string(node.kind)));
  node.attributes.clear();
  const std::string apath = path + "/attributes";
  const auto& attrs = R::array(R::field(j, "attributes", path), apath);
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    const std::string ap = apath + "/" + std::to_string(i);
    Attribute a;
    a.name = R::string_at(attrs[i], "name", ap);
    const std::string fpath = ap + "/features";
    const auto& feats = R::array(R::field(attrs[i], "features", ap), fpath);
    for (std::size_t k = 0; k < feats.size(); ++k) {
      const std::string fp = fpath + "/" + std::to_string(k);
      Feature f;
      f.name = R::string_at(feats[k], "name", fp);
      f.label = R::string_at(feats[k], "label", fp);
      f.unit = R::string_at(feats[k], "unit", fp);
      const auto& v = R::field(feats[k], "value", fp);
      if (v.is_number()) f.value = v.get<double>();
      else if (v.is_string()) f.value = v.get<std::string>();
      else f.value = R::vec3(v, fp + "/value");
      a.features.push_back(std::move(f));
    }
    node.attributes.push_back(std::move(a));
  }
}

inline NodeId node_ref(const nlohmann::json& j, const std::string& path, std::size_t node_count) {
  const auto v = DocReader::unsigned_int(j, path);
  if (v >= node_count) throw DocReader::invalid(path, "node id out of range");
  return NodeId{static_cast<std::uint32_t>(v)};
}

inline OperandRef operand_from_json(const nlohmann::json& j, const std::string& path, std::size_t node_count) {
  using R = DocReader;
  if (!j.is_object()) throw R::invalid(path, "expected an operand object");
  if (auto* s = R::optional(j, "scalar")) return R::number(*s, path + "/scalar");
  if (auto* v = R::optional(j, "vector")) return R::vec3(*v, path + "/vector");
  FeaturePath p;
  p.node = node_ref(R::field(j, "node", path), path + "/node", node_count);
  p.attribute = R::string_at(j, "attribute", path);
  p.feature = R::string_at(j, "feature", path);
  return p;
}

inline Constraint constraint_from_json(const nlohmann::json& j, const std::string& path, std::size_t node_count) {
  using R = DocReader;
  Constraint c;
  const std::string kind = R::string_at(j, "kind", path);
  auto k = constraint_kind_from_string(kind);
  if (!k) throw R::invalid(path + "/kind", "unknown constraint kind " + kind);
  c.kind = *k;
  const auto& ops = R::array(R::field(j, "operands", path), path + "/operands");
  for (std::size_t i = 0; i < ops.size(); ++i)
    c.operands.push_back(operand_from_json(ops[i], path + "/operands/" + std::to_string(i), node_count));
  const auto& crit = R::array(R::field(j, "criteria", path), path + "/criteria");
  for (std::size_t i = 0; i < crit.size(); ++i) {
    const auto v = R::unsigned_int(crit[i], path + "/criteria/" + std::to_string(i));
    if (v >= c.operands.size()) throw R::invalid(path + "/criteria/" + std::to_string(i), "criteria index out of range");
    c.criteria.push_back(static_cast<std::size_t>(v));
  }
  if (c.kind == ConstraintKind::kSimilarDir) c.theta_deg = R::number_at(j, "theta", path);
  if (auto* o = R::optional(j, "origin")) c.origin = R::string(*o, path + "/origin");
  try {
    check_well_formed(c);
  } catch (const ConstraintError& e) {
    throw R::invalid(path, e.what());
  }
  return c;
}

inline DynamicModel model_from_json(const nlohmann::json& j, const std::string& path, std::size_t node_count) {
  using R = DocReader;
  DynamicModel m;
  const std::string kind = R::string_at(j, "kind", path);
  auto k = dynamic_kind_from_string(kind);
  if (!k) throw R::invalid(path + "/kind", "unknown dynamic model " + kind);
  m.kind = *k;
  if (auto* v = R::optional(j, "throw_variant")) {
    const std::string s = R::string(*v, path + "/throw_variant");
    if (s == "up") m.throw_variant = ThrowVariant::kUp;
    else if (s == "down") m.throw_variant = ThrowVariant::kDown;
    else throw R::invalid(path + "/throw_variant", "expected up or down");
  }
  m.subject = node_ref(R::field(j, "subject", path), path + "/subject", node_count);
  if (auto* o = R::optional(j, "objective")) m.objective = node_ref(*o, path + "/objective", node_count);
  const auto& rel = R::field(j, "relation", path);
  const std::string rpath = path + "/relation";
  const std::string rk = R::string_at(rel, "kind", rpath);
  if (rk == "none") m.relation.kind = RelationKind::kNone;
  else if (rk == "from") m.relation.kind = RelationKind::kFrom;
  else if (rk == "to") m.relation.kind = RelationKind::kTo;
  else throw R::invalid(rpath + "/kind", "expected none, from or to");
  if (auto* t = R::optional(rel, "target")) m.relation.target = node_ref(*t, rpath + "/target", node_count);
  if (auto* e = R::optional(j, "jump_encoding")) {
    const std::string s = R::string(*e, path + "/jump_encoding");
    if (s == "place_objective") m.jump_encoding = JumpEncoding::kPlaceObjective;
    else if (s == "aim_velocity") m.jump_encoding = JumpEncoding::kAimVelocity;
    else throw R::invalid(path + "/jump_encoding", "unknown encoding");
  }
  const auto& noise = R::array(R::field(j, "noise", path), path + "/noise");
  for (std::size_t i = 0; i < noise.size(); ++i) {
    const std::string np = path + "/noise/" + std::to_string(i);
    m.noise.push_back({R::string_at(noise[i], "name", np), R::number_at(noise[i], "value", np)});
  }
  if (auto* c = R::optional(j, "contact_point")) m.contact_point = R::vec3(*c, path + "/contact_point");
  const auto& cs = R::array(R::field(j, "constraints", path), path + "/constraints");
  for (std::size_t i = 0; i < cs.size(); ++i)
    m.constraints.push_back(constraint_from_json(cs[i], path + "/constraints/" + std::to_string(i), node_count));
  return m;
}

}  // namespace detail

/// Parses a scenario document. Throws DocumentError: kParse (with byte
/// offset) for malformed JSON, kVersion for an unknown schema_version,
/// kMissingField / kInvalidValue otherwise.
inline Scenario deserialize(std::string_view bytes) {
  using R = detail::DocReader;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw DocumentError(DocumentError::Kind::kParse, e.what(), "", e.byte);
  }
  try {
    if (!doc.is_object()) throw R::invalid("", "document root must be an object");
    Scenario s;
    s.schema_version = R::string_at(doc, "schema_version", "");
    if (s.schema_version != kSchemaVersion) throw DocumentError(DocumentError::Kind::kVersion, s.schema_version);

    const auto& seed = R::field(doc, "seed", "");
    s.master_seed = R::unsigned_int(R::field(seed, "master", "/seed"), "/seed/master");
    s.stream = R::unsigned_int(R::field(seed, "stream", "/seed"), "/seed/stream");

    const auto& cfg = R::field(doc, "config", "");
    s.settings.limits = grammar_limits_from_json(R::field(cfg, "grammar", "/config"), "/config/grammar");
    s.settings.dynamics = dynamics_config_from_json(R::field(cfg, "dynamics", "/config"), "/config/dynamics");
    s.settings.max_iter = R::integer_at(cfg, "max_iter", "/config");

    const auto& targets = R::array(R::field(doc, "targets", ""), "/targets");
    const auto& collisions = R::array(R::field(doc, "collisions", ""), "/collisions");
    const auto& env = R::field(doc, "environment", "");
    const auto& render = R::field(doc, "render", "");
    if (targets.empty()) throw R::invalid("/targets", "at least one target object is required");

    s.tree = build_scene_tree(static_cast<int>(targets.size()), static_cast<int>(collisions.size()),
                              derive_stream_seed(s.master_seed, s.stream, StreamDomain::kScene));
    const auto target_ids = s.tree.targets();
    const auto collision_ids = s.tree.collisions();
    for (std::size_t i = 0; i < targets.size(); ++i)
      detail::read_node_attributes(s.tree.node(target_ids[i]), targets[i], "/targets/" + std::to_string(i));
    for (std::size_t i = 0; i < collisions.size(); ++i)
      detail::read_node_attributes(s.tree.node(collision_ids[i]), collisions[i], "/collisions/" + std::to_string(i));
    detail::read_node_attributes(s.tree.node(s.tree.first_of(NodeKind::kEnvironment)), env, "/environment");
    detail::read_node_attributes(s.tree.node(s.tree.first_of(NodeKind::kRender)), render, "/render");

    s.model = detail::model_from_json(R::field(doc, "dynamic_model", ""), "/dynamic_model", s.tree.nodes.size());
    return s;
  } catch (const DocumentError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw DocumentError(DocumentError::Kind::kInvalidValue, e.what());
  } catch (const Error& e) {
    throw DocumentError(DocumentError::Kind::kInvalidValue, e.what());
  }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ValidationReport {
  std::vector<std::string> structural;
  std::vector<std::string> features;
  std::vector<std::string> model;
  ConstraintReport constraints;

  bool ok() const {
    return structural.empty() && features.empty() && model.empty() && constraints.all_satisfied();
  }

  std::vector<std::string> problems() const {
    std::vector<std::string> out = structural;
    out.insert(out.end(), features.begin(), features.end());
    out.insert(out.end(), model.begin(), model.end());
    for (std::size_t i : constraints.unsatisfied) {
      const auto& v = constraints.verdicts[i];
      out.push_back("constraint " + std::to_string(i) + " violated" + (v.error.empty() ? "" : ": " + v.error));
    }
    return out;
  }
};

namespace detail {

inline bool value_matches_domain(const FeatureSpec& spec, const FeatureValue& v) {
  switch (spec.domain) {
    case ValueDomain::kScalar: return std::holds_alternative<double>(v);
    case ValueDomain::kDirection:
    case ValueDomain::kPosition: return std::holds_alternative<Vec3>(v);
    case ValueDomain::kEnum: return std::holds_alternative<std::string>(v);
  }
  return false;
}

inline void check_node_features(const SceneNode& node, const Catalog& catalog, ValidationReport& r) {
  const std::string where = "node " + std::to_string(node.id.value);
  const auto& schema = catalog.schema(node.kind);
  if (node.attributes.size() != schema.size()) {
    r.structural.push_back(where + ": attribute count does not match the catalog schema");
    return;
  }
  const ValueContext ctx = value_context(node, catalog);
  for (std::size_t a = 0; a < schema.size(); ++a) {
    const Attribute& attr = node.attributes[a];
    const AttributeSchema& as = schema[a];
    if (attr.name != as.attribute) {
      r.structural.push_back(where + ": attribute " + attr.name + " where " + as.attribute + " was expected");
      continue;
    }
    std::vector<std::string> names;
    for (const auto& f : attr.features) names.push_back(f.name);
    if (names != as.features) {
      r.structural.push_back(where + "/" + attr.name + ": features do not match the catalog schema");
      continue;
    }
    for (const auto& f : attr.features) {
      const std::string fw = where + "/" + attr.name + "/" + f.name;
      const FeatureSpec& spec = catalog.spec(attr.name, f.name);
      if (f.unit != spec.unit) r.features.push_back(fw + ": unit " + f.unit + " should be " + spec.unit);
      if (!value_matches_domain(spec, f.value)) {
        r.features.push_back(fw + ": value has the wrong type");
        continue;
      }
      auto label = find_label(spec, f.value, ctx);
      if (!label) r.features.push_back(fw + ": value lies outside every bucket");
      else if (*label != f.label) r.features.push_back(fw + ": label " + f.label + " but value belongs to " + *label);
      if (const auto* pin = catalog.pinned(node.kind, attr.name, f.name)) {
        if (f.label != pin->label || f.value != pin->value) r.features.push_back(fw + ": pinned value was changed");
      }
      if (spec.dependency) {
        const Feature* ctrl = attr.find(spec.dependency->controller);
        auto it = ctrl ? spec.dependency->subsets.find(ctrl->label) : spec.dependency->subsets.end();
        if (it == spec.dependency->subsets.end() ||
            std::find(it->second.begin(), it->second.end(), f.label) == it->second.end())
          r.features.push_back(fw + ": label " + f.label + " not allowed by " + spec.dependency->controller);
      }
    }
  }
}

inline void check_model(const Scenario& s, ValidationReport& r) {
  const auto& m = s.model;
  const auto& t = s.tree;
  auto is_kind = [&](NodeId id, NodeKind k) { return id.value < t.nodes.size() && t.node(id).kind == k; };
  auto is_obj = [&](NodeId id) { return id.value < t.nodes.size() && is_object(t.node(id).kind); };
  if (!is_kind(m.subject, NodeKind::kTargetObject)) r.model.push_back("subject is not a target object");
  if (is_multi_object(m.kind)) {
    if (!m.objective) r.model.push_back("objective missing");
    else if (!is_obj(*m.objective) || *m.objective == m.subject) r.model.push_back("objective is not a distinct object");
    else if (m.kind == DynamicKind::kStrike && !is_kind(*m.objective, NodeKind::kTargetObject))
      r.model.push_back("STRIKE objective must be a target object");
  } else if (m.objective) {
    r.model.push_back("single-object model carries an objective");
  }
  if ((m.kind == DynamicKind::kThrow) != m.throw_variant.has_value()) r.model.push_back("throw variant mismatch");
  if (m.relation.kind == RelationKind::kNone) {
    if (m.relation.target) r.model.push_back("relation none carries a target");
  } else if (!m.relation.target || !is_obj(*m.relation.target) || *m.relation.target == m.subject ||
             (m.objective && *m.relation.target == *m.objective)) {
    r.model.push_back("relation target is not a distinct object");
  }
}

}  // namespace detail

/// Independent check of a scenario: tree structure, catalog schema, label
/// and value consistency, static collision objects, model roles, and every
/// constraint re-evaluated.
inline ValidationReport validate(const Scenario& s, const Catalog& catalog) {
  ValidationReport r;
  if (s.schema_version != kSchemaVersion) r.structural.push_back("unsupported schema_version " + s.schema_version);
  const auto structure = validate_structure(s.tree);
  r.structural.insert(r.structural.end(), structure.begin(), structure.end());
  if (!r.structural.empty()) return r;
  for (const auto& node : s.tree.nodes) {
    if (catalog.schema(node.kind).empty()) continue;
    detail::check_node_features(node, catalog, r);
  }
  for (NodeId id : s.tree.collisions()) {
    const Feature* v = s.tree.find(velocity_value_path(id));
    const double* d = v ? std::get_if<double>(&v->value) : nullptr;
    if (!d || *d != 0.0) r.features.push_back("collision object " + std::to_string(id.value) + " is not static");
  }
  detail::check_model(s, r);
  r.constraints = evaluate_all(s.tree, s.model.constraints);
  return r;
}

}  // namespace animgram
