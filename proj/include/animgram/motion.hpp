#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "animgram/catalog.hpp"
#include "animgram/dynamics.hpp"
#include "animgram/error.hpp"
#include "animgram/scenario.hpp"
#include "animgram/scene.hpp"
#include "animgram/vec3.hpp"

namespace animgram {

inline constexpr Vec3 kGravity{0.0, -9.8, 0.0};

struct BodyState {
  NodeId id;
  Vec3 position;
  Vec3 velocity;
  Vec3 half_extents;
  bool movable = true;
  friend bool operator==(const BodyState&, const BodyState&) = default;
};

/// frames[0] is the initial state; frames.size() == steps + 1.
struct MotionTrace {
  double dt = 1e-3;
  Vec3 gravity = kGravity;
  std::vector<std::vector<BodyState>> frames;

  const BodyState* body(std::size_t frame, NodeId id) const {
    if (frame >= frames.size()) return nullptr;
    for (const auto& b : frames[frame])
      if (b.id == id) return &b;
    return nullptr;
  }
};

struct OracleSettings {
  int steps = 1000;
  double dt = 1e-3;
  Vec3 gravity = kGravity;
  friend bool operator==(const OracleSettings&, const OracleSettings&) = default;
};

/// Initial body states: every object, with velocity = speed * unit
/// direction. Collision objects never move.
inline std::vector<BodyState> initial_bodies(const ParseTree& tree, const Catalog& catalog) {
  std::vector<BodyState> out;
  for (NodeId id : tree.objects()) {
    const SceneNode& node = tree.node(id);
    BodyState b;
    b.id = id;
    b.movable = node.kind == NodeKind::kTargetObject;
    auto e = object_extents(node, catalog);
    if (!e) throw Error("object " + std::to_string(id.value) + " has no shape extents");
    b.half_extents = *e * 0.5;
    const Feature* p = tree.find(position_path(id));
    if (!p || !std::holds_alternative<Vec3>(p->value))
      throw Error("object " + std::to_string(id.value) + " has no initial position");
    b.position = std::get<Vec3>(p->value);
    if (b.movable) {
      const Feature* speed = tree.find(velocity_value_path(id));
      const Feature* dir = tree.find(velocity_direction_path(id));
      const double* s = speed ? std::get_if<double>(&speed->value) : nullptr;
      const Vec3* d = dir ? std::get_if<Vec3>(&dir->value) : nullptr;
      if (s && d && norm(*d) > 0.0) b.velocity = normalized(*d) * *s;
    }
    out.push_back(b);
  }
  return out;
}

/// Semi-implicit Euler over non-interacting bodies with a ground plane at
/// y = 0.
inline MotionTrace simulate(std::vector<BodyState> bodies, int steps, double dt, Vec3 gravity = kGravity) {
  if (!(dt > 0.0)) throw Error("time step must be positive");
  if (steps < 0) throw Error("step count must be non-negative");
  MotionTrace trace;
  trace.dt = dt;
  trace.gravity = gravity;
  trace.frames.reserve(static_cast<std::size_t>(steps) + 1);
  trace.frames.push_back(bodies);
  for (int i = 0; i < steps; ++i) {
    for (BodyState& b : bodies) {
      if (!b.movable) continue;
      b.velocity += gravity * dt;
      b.position += b.velocity * dt;
      if (b.position.y < b.half_extents.y) {
        b.position.y = b.half_extents.y;
        if (b.velocity.y < 0.0) b.velocity.y = 0.0;
      }
    }
    trace.frames.push_back(bodies);
  }
  return trace;
}

inline MotionTrace simulate(const Scenario& scenario, const Catalog& catalog, const OracleSettings& settings = {}) {
  return simulate(initial_bodies(scenario.tree, catalog), settings.steps, settings.dt, settings.gravity);
}

struct PredicateResult {
  std::string name;
  bool holds = true;
  std::optional<std::size_t> failed_frame;  // first frame where it broke
};

struct SemanticVerdict {
  DynamicKind kind = DynamicKind::kJump;
  std::vector<PredicateResult> predicates;
  bool ok() const {
    for (const auto& p : predicates)
      if (!p.holds) return false;
    return true;
  }
};

namespace detail {

inline double horizontal_distance(const Vec3& a, const Vec3& b) { return std::hypot(a.x - b.x, a.z - b.z); }

class TraceReader {
 public:
  explicit TraceReader(const MotionTrace& t) : trace_(t) {}

  const BodyState& at(std::size_t frame, NodeId id) const {
    const BodyState* b = trace_.body(frame, id);
    if (!b) throw Error("trace has no body " + std::to_string(id.value) + " at frame " + std::to_string(frame));
    return *b;
  }
  /// Frames 1..n that exist, so short traces are checked as far as they go.
  std::size_t last(std::size_t n) const { return std::min(n, trace_.frames.size() - 1); }

 private:
  const MotionTrace& trace_;
};

/// `holds(k)` is checked for k = 1..n; the first k where it fails is kept.
template <class Pred>
PredicateResult over_frames(std::string name, std::size_t n, Pred holds) {
  PredicateResult r{std::move(name), true, std::nullopt};
  for (std::size_t k = 1; k <= n; ++k) {
    if (!holds(k)) {
      r.holds = false;
      r.failed_frame = k;
      break;
    }
  }
  return r;
}

}  // namespace detail

/// Checks the motion a dynamic model is meant to produce against the early
/// frames of a trace.
inline SemanticVerdict check_semantics(const DynamicModel& model, const MotionTrace& trace) {
  if (trace.frames.size() < 2) throw Error("trace needs at least one step");
  detail::TraceReader t(trace);
  const NodeId sub = model.subject;
  t.at(0, sub);
  SemanticVerdict v;
  v.kind = model.kind;
  auto y = [&](std::size_t k, NodeId id) { return t.at(k, id).position.y; };

  switch (model.kind) {
    case DynamicKind::kJump:
      v.predicates.push_back(detail::over_frames("rises", 1, [&](std::size_t k) { return y(k, sub) > y(k - 1, sub); }));
      break;
    case DynamicKind::kDrop:
      v.predicates.push_back(
          detail::over_frames("does not rise", t.last(5), [&](std::size_t k) { return y(k, sub) <= y(k - 1, sub); }));
      break;
    case DynamicKind::kFly:
    case DynamicKind::kThrow:
    case DynamicKind::kSlide: {
      const Vec3 start = t.at(0, sub).position;
      v.predicates.push_back(detail::over_frames("moves horizontally", t.last(5), [&](std::size_t k) {
        return detail::horizontal_distance(t.at(k, sub).position, start) > 0.0;
      }));
      if (model.kind == DynamicKind::kThrow && model.throw_variant) {
        if (*model.throw_variant == ThrowVariant::kUp)
          v.predicates.push_back(detail::over_frames("rises", 1, [&](std::size_t k) { return y(k, sub) > y(k - 1, sub); }));
        else
          v.predicates.push_back(
              detail::over_frames("does not rise", 1, [&](std::size_t k) { return y(k, sub) <= y(k - 1, sub); }));
      }
      break;
    }
    case DynamicKind::kPush: {
      if (!model.objective) throw Error("PUSH model has no objective");
      const NodeId obj = *model.objective;
      v.predicates.push_back(detail::over_frames("closes on objective", 1, [&](std::size_t k) {
        return norm(t.at(k, sub).position - t.at(k, obj).position) <
               norm(t.at(k - 1, sub).position - t.at(k - 1, obj).position);
      }));
      break;
    }
    case DynamicKind::kStrike: {
      if (!model.objective) throw Error("STRIKE model has no objective");
      if (!model.contact_point) throw Error("STRIKE model has no contact point");
      const Vec3 c = *model.contact_point;
      for (NodeId mover : {sub, *model.objective}) {
        v.predicates.push_back(detail::over_frames(
            "object " + std::to_string(mover.value) + " closes on contact", 1, [&](std::size_t k) {
              return norm(t.at(k, mover).position - c) < norm(t.at(k - 1, mover).position - c);
            }));
      }
      break;
    }
  }
  return v;
}

/// One CSV row per body per frame.
inline void write_trace_csv(std::ostream& out, const MotionTrace& trace) {
  out << "frame,body,px,py,pz,vx,vy,vz\n";
  char buf[256];
  for (std::size_t f = 0; f < trace.frames.size(); ++f) {
    for (const BodyState& b : trace.frames[f]) {
      std::snprintf(buf, sizeof buf, "%zu,%u,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", f, b.id.value, b.position.x,
                    b.position.y, b.position.z, b.velocity.x, b.velocity.y, b.velocity.z);
      out << buf;
    }
  }
}

}  // namespace animgram
