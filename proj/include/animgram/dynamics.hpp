#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "animgram/catalog.hpp"
#include "animgram/constraint.hpp"
#include "animgram/error.hpp"
#include "animgram/resampler.hpp"
#include "animgram/rng.hpp"
#include "animgram/scene.hpp"

namespace animgram {

enum class DynamicKind { kJump, kDrop, kFly, kThrow, kSlide, kPush, kStrike };

inline constexpr DynamicKind kAllDynamicKinds[] = {DynamicKind::kJump,  DynamicKind::kDrop,  DynamicKind::kFly,
                                                   DynamicKind::kThrow, DynamicKind::kSlide, DynamicKind::kPush,
                                                   DynamicKind::kStrike};

constexpr std::string_view to_string(DynamicKind k) {
  switch (k) {
    case DynamicKind::kJump: return "JUMP";
    case DynamicKind::kDrop: return "DROP";
    case DynamicKind::kFly: return "FLY";
    case DynamicKind::kThrow: return "THROW";
    case DynamicKind::kSlide: return "SLIDE";
    case DynamicKind::kPush: return "PUSH";
    case DynamicKind::kStrike: return "STRIKE";
  }
  return "?";
}

inline std::optional<DynamicKind> dynamic_kind_from_string(std::string_view s) {
  for (DynamicKind k : kAllDynamicKinds)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

constexpr bool is_multi_object(DynamicKind k) { return k == DynamicKind::kPush || k == DynamicKind::kStrike; }

enum class ThrowVariant { kUp, kDown };
enum class RelationKind { kNone, kFrom, kTo };
enum class JumpEncoding { kPlaceObjective, kAimVelocity };

constexpr std::string_view to_string(ThrowVariant v) { return v == ThrowVariant::kUp ? "up" : "down"; }
constexpr std::string_view to_string(RelationKind r) {
  return r == RelationKind::kNone ? "none" : r == RelationKind::kFrom ? "from" : "to";
}
constexpr std::string_view to_string(JumpEncoding e) {
  return e == JumpEncoding::kPlaceObjective ? "place_objective" : "aim_velocity";
}

struct Relation {
  RelationKind kind = RelationKind::kNone;
  std::optional<NodeId> target;
  friend bool operator==(const Relation&, const Relation&) = default;
};

/// A recorded random draw used while instantiating constraints.
struct NoiseDraw {
  std::string name;
  double value = 0.0;
  friend bool operator==(const NoiseDraw&, const NoiseDraw&) = default;
};

struct DynamicModel {
  DynamicKind kind = DynamicKind::kJump;
  std::optional<ThrowVariant> throw_variant;
  NodeId subject;
  std::optional<NodeId> objective;  // PUSH and STRIKE only
  Relation relation;
  std::optional<JumpEncoding> jump_encoding;
  std::vector<NoiseDraw> noise;
  std::optional<Vec3> contact_point;  // STRIKE only
  std::vector<Constraint> constraints;
  friend bool operator==(const DynamicModel&, const DynamicModel&) = default;
};

struct DynamicsConfig {
  double theta0_deg = 30.0;      // cone around the motion's main direction
  double theta1_deg = 30.0;      // cone around the aim at a "to" objective
  double alpha = 0.5;            // upward bias when aiming a jump
  double v_min = 1.0;            // m/s
  double v_small = 0.3;          // m/s
  double v_large = 5.0;          // m/s
  double gap_max = 0.05;         // spacing noise upper bound, m (also s for lead times)
  double lift_factor = 0.1;      // slide lift bound as a fraction of max extent
  double sky_factor = 2.0;       // airborne threshold, multiples of max extent
  double p_none = 0.4;
  double p_from = 0.3;
  double p_to = 0.3;
  friend bool operator==(const DynamicsConfig&, const DynamicsConfig&) = default;

  bool valid() const {
    const double sum = p_none + p_from + p_to;
    return theta0_deg > 0.0 && theta0_deg < 90.0 && theta1_deg > 0.0 && theta1_deg < 90.0 && alpha >= 0.0 &&
           v_small > 0.0 && v_small < v_min && v_min < v_large && gap_max >= 0.0 && lift_factor >= 0.0 &&
           sky_factor > 0.0 && p_none >= 0.0 && p_from >= 0.0 && p_to >= 0.0 && std::abs(sum - 1.0) < 1e-9;
  }
};

/// Picks a kind whose object requirement the tree meets, then its roles.
/// The subject is always a TargetObject; a PUSH objective may be any other
/// object, a STRIKE objective must also move and so is another target.
inline DynamicModel sample_dynamic_model(const ParseTree& tree, Rng& rng) {
  const auto targets = tree.targets();
  const auto objects = tree.objects();
  if (targets.empty()) throw Error("sample_dynamic_model: tree has no target object");
  std::vector<DynamicKind> eligible = {DynamicKind::kJump, DynamicKind::kDrop, DynamicKind::kFly, DynamicKind::kThrow,
                                       DynamicKind::kSlide};
  if (objects.size() >= 2) eligible.push_back(DynamicKind::kPush);
  if (targets.size() >= 2) eligible.push_back(DynamicKind::kStrike);

  DynamicModel m;
  m.kind = eligible[rng.below(eligible.size())];
  if (m.kind == DynamicKind::kThrow) m.throw_variant = rng.coin() ? ThrowVariant::kUp : ThrowVariant::kDown;
  m.subject = targets[rng.below(targets.size())];
  if (is_multi_object(m.kind)) {
    std::vector<NodeId> pool;
    for (NodeId id : m.kind == DynamicKind::kStrike ? targets : objects)
      if (id != m.subject) pool.push_back(id);
    m.objective = pool[rng.below(pool.size())];
  }
  return m;
}

/// Objects neither subject nor objective.
inline std::vector<NodeId> spare_objects(const DynamicModel& m, const ParseTree& tree) {
  std::vector<NodeId> out;
  for (NodeId id : tree.objects())
    if (id != m.subject && (!m.objective || id != *m.objective)) out.push_back(id);
  return out;
}

inline void attach_relation(DynamicModel& m, const ParseTree& tree, const DynamicsConfig& cfg, Rng& rng) {
  m.relation = {};
  const auto spare = spare_objects(m, tree);
  if (spare.empty()) return;
  const double u = rng.uniform();
  if (u < cfg.p_none) return;
  m.relation.kind = u < cfg.p_none + cfg.p_from ? RelationKind::kFrom : RelationKind::kTo;
  m.relation.target = spare[rng.below(spare.size())];
}

namespace detail {

/// Builds constraint rows from the tree's current feature values and
/// records every noise draw on the model.
class RowBuilder {
 public:
  RowBuilder(DynamicModel& model, const ParseTree& tree, const Catalog& catalog, const DynamicsConfig& cfg, Rng& rng)
      : m_(model), tree_(tree), catalog_(catalog), cfg_(cfg), rng_(rng) {
    check_roles();
  }

  std::vector<Constraint> motion_rows();
  std::vector<Constraint> relation_rows();

 private:
  void check_roles() const {
    auto check = [&](NodeId id, const char* role) {
      if (id.value >= tree_.nodes.size() || !is_object(tree_.node(id).kind))
        throw Error(std::string("dynamic model ") + role + " is not an object in the tree");
    };
    check(m_.subject, "subject");
    if (tree_.node(m_.subject).kind != NodeKind::kTargetObject) throw Error("dynamic model subject must be a target");
    if (is_multi_object(m_.kind)) {
      if (!m_.objective) throw Error("multi-object dynamic model lacks an objective");
      check(*m_.objective, "objective");
      if (*m_.objective == m_.subject) throw Error("objective equals subject");
    }
    if (m_.relation.kind != RelationKind::kNone) {
      if (!m_.relation.target) throw Error("relation lacks a target object");
      check(*m_.relation.target, "relation target");
      if (*m_.relation.target == m_.subject || (m_.objective && *m_.relation.target == *m_.objective))
        throw Error("relation target must differ from subject and objective");
    }
  }

  NodeId sub() const { return m_.subject; }
  NodeId obj() const { return *m_.objective; }
  NodeId extra() const { return *m_.relation.target; }
  bool relation_is(RelationKind k) const { return m_.relation.kind == k; }

  Vec3 position(NodeId n) const { return std::get<Vec3>(tree_.find(position_path(n))->value); }
  double speed(NodeId n) const { return std::get<double>(tree_.find(velocity_value_path(n))->value); }
  Vec3 heading(NodeId n) const { return normalized(std::get<Vec3>(tree_.find(velocity_direction_path(n))->value)); }
  Vec3 extents(NodeId n) const {
    auto e = object_extents(tree_.node(n), catalog_);
    if (!e) throw Error("object " + std::to_string(n.value) + " has no shape extents");
    return *e;
  }
  static double max_extent(const Vec3& e) { return std::max({e.x, e.y, e.z}); }

  double draw(const char* name, double lo, double hi) {
    const double v = lo == hi ? lo : rng_.uniform(lo, hi);
    m_.noise.push_back({name, v});
    return v;
  }
  double sign(const char* name) {
    const double s = rng_.sign();
    m_.noise.push_back({name, s});
    return s;
  }

  /// Keeps a ground-truth position inside the world with the object resting
  /// on or above the ground.
  Vec3 settle(Vec3 p, NodeId n) const {
    const auto& w = catalog_.world();
    const Vec3 e = extents(n);
    p.x = std::clamp(p.x, -w.half_width, w.half_width);
    p.z = std::clamp(p.z, -w.half_width, w.half_width);
    p.y = std::clamp(p.y, 0.5 * e.y, w.max_height);
    return p;
  }

  /// Position for `mover` beside `anchor`, offset on each axis by half the
  /// summed extents plus a gap, each axis on a random side.
  Vec3 beside(const Vec3& anchor_pos, NodeId anchor, NodeId mover) {
    const Vec3 sa = extents(anchor), sm = extents(mover);
    const double gap = draw("gap", 0.0, cfg_.gap_max);
    const char* names[3] = {"side_x", "side_y", "side_z"};
    Vec3 p;
    for (int a = 0; a < 3; ++a) p[a] = anchor_pos[a] + sign(names[a]) * (sm[a] + sa[a] + gap) * 0.5;
    return settle(p, mover);
  }

  /// Where the subject is heading: position plus extents plus a short lead
  /// along its velocity.
  Vec3 lead_point(NodeId mover, NodeId placed) {
    const double lead = draw("lead_time", 0.0, cfg_.gap_max);
    return settle(position(mover) + extents(mover) + heading(mover) * (speed(mover) * lead), placed);
  }

  Vec3 horizontal_heading() {
    for (;;) {
      const double a = draw("heading_x", -1.0, 1.0);
      const double b = draw("heading_z", -1.0, 1.0);
      if (a != 0.0 || b != 0.0) return {a, 0.0, b};
    }
  }

  static Vec3 nonzero(const Vec3& d) {
    if (!(norm(d) > 1e-9)) throw SamplingError("degenerate ground-truth direction");
    return d;
  }

  double airborne_height(NodeId n) const { return cfg_.sky_factor * max_extent(extents(n)); }

  Constraint similar(const Vec3& axis, NodeId n, double theta, const char* origin) const {
    return {ConstraintKind::kSimilarDir, {nonzero(axis), velocity_direction_path(n)}, {0}, theta, origin};
  }
  Constraint speed_at_least(double v, NodeId n, const char* origin) const {
    return {ConstraintKind::kLessEq, {v, velocity_value_path(n)}, {0}, 0.0, origin};
  }
  Constraint speed_at_most(double v, NodeId n, const char* origin) const {
    return {ConstraintKind::kLargerEq, {v, velocity_value_path(n)}, {0}, 0.0, origin};
  }
  Constraint place(const Vec3& p, NodeId n, const char* origin) const {
    return {ConstraintKind::kEq, {p, position_path(n)}, {0}, 0.0, origin};
  }
  Constraint at_least(const Vec3& p, NodeId n, const char* origin) const {
    return {ConstraintKind::kLessEq, {p, position_path(n)}, {0}, 0.0, origin};
  }
  Constraint between(const Vec3& lo, NodeId n, const Vec3& hi, const char* origin) const {
    return {ConstraintKind::kLessEq, {lo, position_path(n), hi}, {0, 2}, 0.0, origin};
  }

  DynamicModel& m_;
  const ParseTree& tree_;
  const Catalog& catalog_;
  const DynamicsConfig& cfg_;
  Rng& rng_;
};

inline std::vector<Constraint> RowBuilder::motion_rows() {
  const double w = catalog_.world().half_width;
  std::vector<Constraint> rows;
  switch (m_.kind) {
    case DynamicKind::kJump:
      rows.push_back(similar(kUp, sub(), cfg_.theta0_deg, "basic"));
      rows.push_back(speed_at_least(cfg_.v_min, sub(), "basic"));
      break;
    case DynamicKind::kDrop:
      rows.push_back(similar(kDown, sub(), cfg_.theta0_deg, "basic"));
      rows.push_back(speed_at_most(cfg_.v_small, sub(), "basic"));
      rows.push_back(at_least({-w, airborne_height(sub()), -w}, sub(), "basic"));
      break;
    case DynamicKind::kFly:
      rows.push_back(similar(horizontal_heading(), sub(), cfg_.theta0_deg, "basic"));
      rows.push_back(speed_at_least(cfg_.v_large, sub(), "basic"));
      rows.push_back(at_least({-w, airborne_height(sub()), -w}, sub(), "basic"));
      break;
    case DynamicKind::kThrow: {
      const double a = draw("heading_x", -1.0, 1.0);
      const double b = draw("heading_z", -1.0, 1.0);
      const double up = m_.throw_variant == ThrowVariant::kDown ? -1.0 : 1.0;
      rows.push_back(similar({a, up, b}, sub(), cfg_.theta0_deg, "basic"));
      break;
    }
    case DynamicKind::kSlide: {
      rows.push_back(similar(horizontal_heading(), sub(), cfg_.theta0_deg, "basic"));
      if (!relation_is(RelationKind::kFrom)) {
        const double rest = 0.5 * extents(sub()).y;
        const double lift = draw("lift", 0.0, cfg_.lift_factor * max_extent(extents(sub())));
        rows.push_back(between({-w, rest, -w}, sub(), {w, rest + lift, w}, "basic"));
      }
      break;
    }
    case DynamicKind::kPush: {
      Vec3 sub_at, obj_at = position(obj());
      std::optional<Vec3> obj_gt;
      if (relation_is(RelationKind::kFrom)) {
        const Vec3 origin = position(extra());
        sub_at = beside(origin, extra(), sub());
        const Vec3 away = nonzero(sub_at - origin);
        const Vec3 se = extents(sub()), oe = extents(obj());
        const double reach = 0.5 * std::max({se.x + oe.x, se.y + oe.y, se.z + oe.z}) + draw("gap", 0.0, cfg_.gap_max);
        obj_gt = settle(sub_at + normalized(away) * reach, obj());
        obj_at = *obj_gt;
      } else {
        sub_at = beside(obj_at, obj(), sub());
      }
      rows.push_back(similar(obj_at - sub_at, sub(), cfg_.theta0_deg, "basic"));
      rows.push_back(speed_at_least(cfg_.v_large, sub(), "basic"));
      rows.push_back(speed_at_most(cfg_.v_small, obj(), "basic"));
      if (obj_gt) {
        rows.push_back(place(sub_at, sub(), "from"));
        rows.push_back(place(*obj_gt, obj(), "from"));
      } else {
        rows.push_back(place(sub_at, sub(), "basic"));
      }
      break;
    }
    case DynamicKind::kStrike: {
      Vec3 obj_at = position(obj());
      std::optional<Vec3> obj_gt;
      if (relation_is(RelationKind::kFrom)) {
        obj_gt = beside(position(sub()), sub(), obj());
        obj_at = *obj_gt;
      }
      Vec3 contact;
      if (relation_is(RelationKind::kTo)) {
        contact = position(extra());
      } else {
        const double floor = std::max(0.5 * extents(sub()).y, 0.5 * extents(obj()).y);
        const double reach = catalog_.world().placement_half_width;
        contact.x = draw("contact_x", -reach, reach);
        contact.y = draw("contact_y", floor, std::max(floor, reach));
        contact.z = draw("contact_z", -reach, reach);
      }
      m_.contact_point = contact;
      rows.push_back(similar(contact - position(sub()), sub(), cfg_.theta0_deg, "basic"));
      rows.push_back(similar(contact - obj_at, obj(), cfg_.theta0_deg, "basic"));
      rows.push_back(speed_at_least(cfg_.v_large, sub(), "basic"));
      rows.push_back(speed_at_least(cfg_.v_large, obj(), "basic"));
      if (obj_gt) rows.push_back(place(*obj_gt, obj(), "from"));
      break;
    }
  }
  return rows;
}

inline std::vector<Constraint> RowBuilder::relation_rows() {
  std::vector<Constraint> rows;
  if (relation_is(RelationKind::kNone)) return rows;
  const bool from = relation_is(RelationKind::kFrom);
  switch (m_.kind) {
    case DynamicKind::kJump:
      if (from) {
        rows.push_back(place(beside(position(extra()), extra(), sub()), sub(), "from"));
        break;
      }
      m_.jump_encoding = rng_.coin() ? JumpEncoding::kPlaceObjective : JumpEncoding::kAimVelocity;
      if (m_.jump_encoding == JumpEncoding::kAimVelocity) {
        const Vec3 aim = nonzero(position(extra()) - position(sub()) + kUp * cfg_.alpha);
        // Falls back to placing the objective when the aim cone cannot meet
        // the jump cone.
        if (angle_between(aim, kUp) <= deg_to_rad(cfg_.theta0_deg + cfg_.theta1_deg)) {
          rows.push_back(similar(aim, sub(), cfg_.theta1_deg, "to"));
          break;
        }
        m_.jump_encoding = JumpEncoding::kPlaceObjective;
      }
      rows.push_back(place(lead_point(sub(), extra()), extra(), "to"));
      break;
    case DynamicKind::kDrop:
      if (from) {
        rows.push_back(place(beside(position(sub()), sub(), extra()), extra(), "from"));
      } else {
        Vec3 p = beside(position(sub()), sub(), extra());
        p.y = 0.5 * extents(extra()).y + draw("gap", 0.0, cfg_.gap_max);
        rows.push_back(place(settle(p, extra()), extra(), "to"));
      }
      break;
    case DynamicKind::kFly:
    case DynamicKind::kThrow:
      if (from) rows.push_back(place(beside(position(sub()), sub(), extra()), extra(), "from"));
      else rows.push_back(place(lead_point(sub(), extra()), extra(), "to"));
      break;
    case DynamicKind::kSlide:
      if (from) {
        const Vec3 base = position(extra());
        const Vec3 be = extents(extra()), se = extents(sub());
        const double lift = draw("lift", 0.0, cfg_.lift_factor * max_extent(se));
        Vec3 p;
        p.x = draw("footprint_x", base.x - 0.5 * be.x, base.x + 0.5 * be.x);
        p.y = base.y + (se.y + be.y + lift) * 0.5;
        p.z = draw("footprint_z", base.z - 0.5 * be.z, base.z + 0.5 * be.z);
        rows.push_back(place(settle(p, sub()), sub(), "from"));
      } else {
        rows.push_back(place(lead_point(sub(), extra()), extra(), "to"));
      }
      break;
    case DynamicKind::kPush:
      if (!from) {
        const Vec3 oe = extents(obj()), xe = extents(extra());
        const double reach = 0.5 * std::max({oe.x + xe.x, oe.y + xe.y, oe.z + xe.z}) + draw("gap", 0.0, cfg_.gap_max);
        rows.push_back(place(settle(position(obj()) + heading(sub()) * reach, extra()), extra(), "to"));
      }
      break;
    case DynamicKind::kStrike:
      break;
  }
  return rows;
}

}  // namespace detail

/// Rows that depend only on the sampled features: the basic rows, plus the
/// PUSH and STRIKE rows that fix where the movers start.
inline std::vector<Constraint> motion_constraints(DynamicModel& m, const ParseTree& tree, const Catalog& catalog,
                                                  const DynamicsConfig& cfg, Rng& rng) {
  return detail::RowBuilder(m, tree, catalog, cfg, rng).motion_rows();
}

/// "from"/"to" rows, computed from the tree's current values. Call after
/// the motion rows are satisfied so the ground truth uses settled values.
inline std::vector<Constraint> relation_constraints(DynamicModel& m, const ParseTree& tree, const Catalog& catalog,
                                                    const DynamicsConfig& cfg, Rng& rng) {
  return detail::RowBuilder(m, tree, catalog, cfg, rng).relation_rows();
}

/// Every row for (kind, relation) from the current values in one pass.
inline std::vector<Constraint> instantiate_constraints(DynamicModel& m, const ParseTree& tree, const Catalog& catalog,
                                                       const DynamicsConfig& cfg, Rng& rng) {
  auto rows = motion_constraints(m, tree, catalog, cfg, rng);
  auto more = relation_constraints(m, tree, catalog, cfg, rng);
  rows.insert(rows.end(), more.begin(), more.end());
  return rows;
}

/// Hooks called with the constraint list about to be resampled and the
/// tree it will be resampled against.
struct StageObserver {
  virtual ~StageObserver() = default;
  virtual void before_resample(const ParseTree& tree, const std::vector<Constraint>& constraints) = 0;
};

/// Instantiates and enforces the model in two stages: motion rows first,
/// then relation rows derived from the settled values, then all rows
/// together. On success the model carries the full constraint list.
inline ResampleResult apply_dynamic_model(ParseTree& tree, DynamicModel& m, const Catalog& catalog,
                                          const DynamicsConfig& cfg, Rng& rng, int max_iter = 1000,
                                          StageObserver* observer = nullptr) {
  m.noise.clear();
  m.contact_point.reset();
  m.jump_encoding.reset();
  m.constraints.clear();
  auto rows = motion_constraints(m, tree, catalog, cfg, rng);
  if (observer) observer->before_resample(tree, rows);
  ResampleResult r = resample_until_satisfied(tree, rows, catalog, rng, max_iter);
  if (!r.ok()) {
    m.constraints = std::move(rows);
    return r;
  }
  auto more = relation_constraints(m, tree, catalog, cfg, rng);
  rows.insert(rows.end(), more.begin(), more.end());
  m.constraints = rows;
  if (more.empty()) return r;
  if (observer) observer->before_resample(tree, more);
  const int used = r.report.iterations;
  r = resample_until_satisfied(tree, rows, catalog, rng, max_iter);
  r.report.iterations += used;
  return r;
}

}  // namespace animgram
