#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "animgram/catalog.hpp"
#include "animgram/constraint.hpp"
#include "animgram/error.hpp"
#include "animgram/rng.hpp"
#include "animgram/scene.hpp"

namespace animgram {

enum class ResampleStatus { kSatisfied, kCriteriaInfeasible, kMaxIterations };

constexpr std::string_view to_string(ResampleStatus s) {
  switch (s) {
    case ResampleStatus::kSatisfied: return "satisfied";
    case ResampleStatus::kCriteriaInfeasible: return "criteria infeasible";
    case ResampleStatus::kMaxIterations: return "max iterations exceeded";
  }
  return "?";
}

struct ResampleResult {
  ResampleStatus status = ResampleStatus::kSatisfied;
  ConstraintReport report;
  std::string message;

  bool ok() const { return status == ResampleStatus::kSatisfied; }
};

/// Features the resampler must never touch: every feature referenced as a
/// criteria operand by any constraint, plus catalog-pinned features.
inline std::set<FeaturePath> immutable_features(const ParseTree& tree, const std::vector<Constraint>& constraints,
                                                const Catalog& catalog) {
  std::set<FeaturePath> out;
  for (const auto& c : constraints) {
    for (std::size_t i = 0; i < c.operands.size(); ++i) {
      const auto* path = std::get_if<FeaturePath>(&c.operands[i]);
      if (!path) continue;
      if (c.is_criteria(i)) out.insert(*path);
      if (path->node.value < tree.nodes.size() &&
          catalog.pinned(tree.node(path->node).kind, path->attribute, path->feature))
        out.insert(*path);
    }
  }
  return out;
}

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr int kProposalTries = 256;

struct Bound {
  double value = 0.0;
  bool strict = false;
};

struct Interval {
  Bound lo{-kInf, false};
  Bound hi{kInf, false};

  void raise(double v, bool strict) {
    if (v > lo.value || (v == lo.value && strict)) lo = {v, strict};
  }
  void lower(double v, bool strict) {
    if (v < hi.value || (v == hi.value && strict)) hi = {v, strict};
  }
  bool admits(double v) const {
    return (lo.strict ? v > lo.value : v >= lo.value) && (hi.strict ? v < hi.value : v <= hi.value);
  }
};

struct Cone {
  Vec3 axis;
  double half_angle = 0.0;  // radians
};

/// Everything the constraints say about one feature.
struct FeasibleRegion {
  std::optional<FeatureValue> point;
  Interval scalar;
  Interval axis[3];
  std::vector<Cone> cones;
  bool unsupported = false;  // some constraint needs the rejection fallback
};

inline bool operand_is(const OperandRef& op, const FeaturePath& path) {
  const auto* p = std::get_if<FeaturePath>(&op);
  return p && *p == path;
}

inline void add_order_bound(FeasibleRegion& region, ConstraintKind kind, bool other_before, const FeatureValue& other) {
  // For o_i REL o_k with i < k the other operand bounds from one side; the
  // side flips for the "larger" kinds and when the other operand follows.
  const bool strict = kind == ConstraintKind::kLess || kind == ConstraintKind::kLarger;
  const bool ascending = kind == ConstraintKind::kLessEq || kind == ConstraintKind::kLess;
  const bool is_lower = ascending == other_before;
  auto apply = [&](Interval& iv, double v) { is_lower ? iv.raise(v, strict) : iv.lower(v, strict); };
  if (const double* d = std::get_if<double>(&other)) {
    apply(region.scalar, *d);
  } else if (const Vec3* v = std::get_if<Vec3>(&other)) {
    for (int a = 0; a < 3; ++a) apply(region.axis[a], (*v)[a]);
  } else {
    region.unsupported = true;
  }
}

inline FeasibleRegion collect_region(const ParseTree& tree, const std::vector<Constraint>& constraints,
                                     const FeaturePath& path) {
  FeasibleRegion region;
  for (const auto& c : constraints) {
    for (std::size_t k = 0; k < c.operands.size(); ++k) {
      if (!operand_is(c.operands[k], path) || c.is_criteria(k)) continue;
      if (is_order_kind(c.kind)) {
        for (std::size_t i = 0; i < c.operands.size(); ++i) {
          if (i == k || operand_is(c.operands[i], path)) continue;
          add_order_bound(region, c.kind, i < k, resolve_operand(tree, c.operands[i]));
        }
      } else if (c.kind == ConstraintKind::kEq) {
        std::size_t ref = c.criteria.empty() ? (k == 0 ? 1 : 0) : c.criteria.front();
        if (ref < c.operands.size() && ref != k) region.point = resolve_operand(tree, c.operands[ref]);
      } else {
        for (std::size_t j : c.criteria) {
          const Vec3 axis = normalized(as_direction(resolve_operand(tree, c.operands[j])));
          if (c.kind == ConstraintKind::kSameDir) region.point = axis;
          else if (c.kind == ConstraintKind::kOppoDir) region.point = -axis;
          else region.cones.push_back({axis, deg_to_rad(c.theta_deg)});
        }
      }
    }
  }
  return region;
}

/// Draws from the sampleable buckets restricted to `iv`, with the same
/// density as drawing a label then a value and rejecting misses.
inline std::optional<double> sample_scalar_in(const FeatureSpec& spec, const std::vector<std::string>& labels,
                                              const Interval& iv, Rng& rng) {
  struct Piece {
    std::size_t label_index;
    double lo, hi, weight;
  };
  std::vector<Piece> pieces;
  double total = 0.0;
  for (std::size_t i = 0; i < spec.labels.size(); ++i) {
    if (std::find(labels.begin(), labels.end(), spec.labels[i].label) == labels.end()) continue;
    const auto& b = std::get<ScalarBucket>(spec.labels[i].bucket);
    const double lo = std::max(b.lo, iv.lo.value);
    const double hi = std::min(b.hi, iv.hi.value);
    double weight = 0.0;
    if (spec.integral) {
      double count = 0.0, bucket_count = 0.0;
      for (double v = std::ceil(b.lo); v <= b.hi; v += 1.0) {
        if (!scalar_in_bucket(spec, i, v)) continue;
        bucket_count += 1.0;
        if (iv.admits(v)) count += 1.0;
      }
      if (bucket_count > 0.0) weight = count / bucket_count;
    } else if (hi > lo) {
      weight = (hi - lo) / (b.hi - b.lo);
    }
    if (weight > 0.0) {
      pieces.push_back({i, lo, hi, weight});
      total += weight;
    }
  }
  if (pieces.empty()) return std::nullopt;
  for (int attempt = 0; attempt < kProposalTries; ++attempt) {
    double pick = rng.uniform() * total;
    const Piece* chosen = &pieces.back();
    for (const auto& p : pieces) {
      if (pick < p.weight) {
        chosen = &p;
        break;
      }
      pick -= p.weight;
    }
    double v;
    if (spec.integral) {
      std::vector<double> options;
      for (double x = std::ceil(chosen->lo); x <= chosen->hi; x += 1.0)
        if (scalar_in_bucket(spec, chosen->label_index, x) && iv.admits(x)) options.push_back(x);
      if (options.empty()) continue;
      v = options[rng.below(options.size())];
    } else {
      v = chosen->lo + (chosen->hi - chosen->lo) * rng.uniform_open();
    }
    if (iv.admits(v) && scalar_in_bucket(spec, chosen->label_index, v)) return v;
  }
  return std::nullopt;
}

inline std::optional<Vec3> sample_direction_in(const std::vector<Cone>& cones, Rng& rng) {
  const Cone& narrow = *std::min_element(cones.begin(), cones.end(),
                                         [](const Cone& a, const Cone& b) { return a.half_angle < b.half_angle; });
  for (int attempt = 0; attempt < kProposalTries; ++attempt) {
    const Vec3 d = rng.in_cone(narrow.axis, narrow.half_angle);
    bool inside = true;
    for (const auto& c : cones) inside = inside && angle_between(d, c.axis) <= c.half_angle;
    if (inside) return d;
  }
  return std::nullopt;
}

inline std::optional<Vec3> sample_position_in(const FeatureSpec& spec, const FeasibleRegion& region,
                                              const Vec3& extents, Rng& rng) {
  const auto& w = spec.world;
  const double sky = sky_threshold(spec, extents);
  const double domain_lo[3] = {-w.half_width, 0.5 * extents.y, -w.half_width};
  const double domain_hi[3] = {w.half_width, w.max_height, w.half_width};
  const double prefer_lo[3] = {-w.placement_half_width, 0.5 * extents.y, -w.placement_half_width};
  const double prefer_hi[3] = {w.placement_half_width, std::min(sky + w.sky_band, w.max_height),
                               w.placement_half_width};
  Vec3 out;
  for (int a = 0; a < 3; ++a) {
    double lo = std::max(region.axis[a].lo.value, domain_lo[a]);
    double hi = std::min(region.axis[a].hi.value, domain_hi[a]);
    if (lo > hi) return std::nullopt;
    const double plo = std::max(lo, prefer_lo[a]);
    const double phi = std::min(hi, prefer_hi[a]);
    if (plo <= phi) {
      lo = plo;
      hi = phi;
    }
    out[a] = lo == hi ? lo : rng.uniform(lo, hi);
  }
  return out;
}

inline bool constraints_hold_for(const ParseTree& tree, const std::vector<Constraint>& constraints,
                                 const FeaturePath& path) {
  for (const auto& c : constraints) {
    bool involved = false;
    for (const auto& op : c.operands) involved = involved || operand_is(op, path);
    if (!involved) continue;
    try {
      if (!evaluate(tree, c).satisfied) return false;
    } catch (const ConstraintError&) {
      return false;
    }
  }
  return true;
}

/// Writes `value` into the feature at `path` and recomputes its label.
/// Returns false (tree untouched) when no label's bucket holds the value.
inline bool assign_value(ParseTree& tree, const FeaturePath& path, const FeatureValue& value, const Catalog& catalog) {
  const FeatureSpec& spec = catalog.spec(path.attribute, path.feature);
  SceneNode& node = tree.node(path.node);
  auto label = find_label(spec, value, value_context(node, catalog));
  if (!label) return false;
  Feature* f = tree.find(path);
  f->value = value;
  f->label = *label;
  return true;
}

/// Keeps dependents of a changed controller inside their allowed subset.
inline void refresh_dependents(ParseTree& tree, const FeaturePath& path, const Catalog& catalog,
                               const std::set<FeaturePath>& immutable, Rng& rng) {
  SceneNode& node = tree.node(path.node);
  Attribute* attr = node.attribute(path.attribute);
  for (auto& f : attr->features) {
    const FeatureSpec& spec = catalog.spec(path.attribute, f.name);
    if (!spec.dependency || spec.dependency->controller != path.feature) continue;
    if (immutable.count(FeaturePath{path.node, path.attribute, f.name})) continue;
    auto allowed = label_candidates(spec, *attr);
    if (std::find(allowed.begin(), allowed.end(), f.label) != allowed.end()) continue;
    f.label = sample_label(spec, *attr, rng);
    f.value = sample_value(spec, f.label, rng, value_context(node, catalog));
  }
  if (path.attribute == names::kShape) {
    // Extents changed, so the position label may have moved.
    const FeaturePath pos = position_path(path.node);
    Feature* p = tree.find(pos);
    if (!p || immutable.count(pos)) return;
    const FeatureSpec& spec = catalog.spec(names::kMotion, names::kInitialPosition);
    const ValueContext ctx = value_context(node, catalog);
    if (auto label = find_label(spec, p->value, ctx)) {
      p->label = *label;
    } else {
      p->value = sample_value(spec, p->label, rng, ctx);
    }
  }
}

/// One proposal for the feature at `path` that honours every constraint
/// mentioning it as far as the targeted samplers can; nullopt when none
/// was found this round.
inline std::optional<FeatureValue> propose(const ParseTree& tree, const std::vector<Constraint>& constraints,
                                           const FeaturePath& path, const Catalog& catalog, Rng& rng) {
  const FeatureSpec& spec = catalog.spec(path.attribute, path.feature);
  const SceneNode& node = tree.node(path.node);
  const FeasibleRegion region = collect_region(tree, constraints, path);
  if (region.point) return region.point;

  if (!region.unsupported) {
    switch (spec.domain) {
      case ValueDomain::kScalar: {
        auto v = sample_scalar_in(spec, label_candidates(spec, *node.attribute(path.attribute)), region.scalar, rng);
        if (v) return *v;
        break;
      }
      case ValueDomain::kDirection:
        if (!region.cones.empty()) {
          if (auto d = sample_direction_in(region.cones, rng)) return *d;
          return std::nullopt;
        }
        break;
      case ValueDomain::kPosition: {
        auto ctx = value_context(node, catalog);
        if (ctx.extents) {
          if (auto p = sample_position_in(spec, region, *ctx.extents, rng)) return *p;
          return std::nullopt;
        }
        break;
      }
      case ValueDomain::kEnum:
        break;
    }
  }

  // Rejection fallback through the catalog's own sampler.
  ParseTree scratch = tree;
  const Attribute& siblings = *node.attribute(path.attribute);
  const ValueContext ctx = value_context(node, catalog);
  for (int attempt = 0; attempt < kProposalTries; ++attempt) {
    const std::string label = sample_label(spec, siblings, rng);
    FeatureValue v = sample_value(spec, label, rng, ctx);
    Feature* f = scratch.find(path);
    f->value = v;
    f->label = label;
    if (constraints_hold_for(scratch, constraints, path)) return v;
  }
  return std::nullopt;
}

/// Sub-constraint over the immutable operands only, or nullopt when it
/// has nothing to check.
inline std::optional<Constraint> immutable_part(const Constraint& c, const std::set<FeaturePath>& immutable) {
  Constraint sub;
  sub.kind = c.kind;
  sub.theta_deg = c.theta_deg;
  for (std::size_t i = 0; i < c.operands.size(); ++i) {
    const auto* path = std::get_if<FeaturePath>(&c.operands[i]);
    const bool fixed = !path || c.is_criteria(i) || immutable.count(*path);
    if (!fixed) continue;
    if (c.is_criteria(i)) sub.criteria.push_back(sub.operands.size());
    sub.operands.push_back(c.operands[i]);
  }
  if (sub.operands.size() < 2) return std::nullopt;
  if (is_direction_kind(c.kind) && sub.criteria.empty()) return std::nullopt;
  return sub;
}

}  // namespace detail

/// Resamples non-criteria operands until every constraint holds. The tree
/// is modified only on success. Criteria operands, and any feature used as
/// a criteria operand elsewhere, are never written.
inline ResampleResult resample_until_satisfied(ParseTree& tree, const std::vector<Constraint>& constraints,
                                               const Catalog& catalog, Rng& rng, int max_iter = 1000) {
  for (const auto& c : constraints) check_well_formed(c);
  const std::set<FeaturePath> immutable = immutable_features(tree, constraints, catalog);
  ResampleResult result;

  auto fail_infeasible = [&](std::size_t index, std::string why) {
    result.status = ResampleStatus::kCriteriaInfeasible;
    result.report = evaluate_all(tree, constraints);
    result.message = "constraint " + std::to_string(index) + " (" + std::string(to_string(constraints[index].kind)) +
                     "): " + why;
    return result;
  };

  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const Constraint& c = constraints[i];
    for (const auto& op : c.operands) resolve_operand(tree, op);
    if (auto sub = detail::immutable_part(c, immutable))
      if (!evaluate(tree, *sub).satisfied) return fail_infeasible(i, "criteria operands violate it");
    if (c.kind != ConstraintKind::kEq) continue;
    for (std::size_t k = 0; k < c.operands.size(); ++k) {
      const auto* path = std::get_if<FeaturePath>(&c.operands[k]);
      if (!path || immutable.count(*path)) continue;
      for (std::size_t j = 0; j < c.operands.size(); ++j) {
        const auto* other = std::get_if<FeaturePath>(&c.operands[j]);
        if (j == k || (other && !immutable.count(*other))) continue;
        const FeatureSpec& spec = catalog.spec(path->attribute, path->feature);
        if (!find_label(spec, resolve_operand(tree, c.operands[j]), value_context(tree.node(path->node), catalog)))
          return fail_infeasible(i, "required value lies outside the feature's domain");
      }
    }
  }

  ParseTree work = tree;
  int iterations = 0;
  for (;;) {
    std::optional<std::size_t> violated;
    ConstraintVerdict verdict;
    for (std::size_t i = 0; i < constraints.size() && !violated; ++i) {
      verdict = evaluate(work, constraints[i]);
      if (!verdict.satisfied) violated = i;
    }
    if (!violated) {
      tree = std::move(work);
      result.status = ResampleStatus::kSatisfied;
      result.report = evaluate_all(tree, constraints);
      result.report.iterations = iterations;
      return result;
    }
    if (iterations >= max_iter) break;
    ++iterations;

    const Constraint& c = constraints[*violated];
    std::optional<FeaturePath> target;
    for (std::size_t k : verdict.violating) {
      const auto* path = std::get_if<FeaturePath>(&c.operands[k]);
      if (path && !c.is_criteria(k) && !immutable.count(*path)) {
        target = *path;
        break;
      }
    }
    if (!target) return fail_infeasible(*violated, "no mutable operand can repair it");

    auto value = detail::propose(work, constraints, *target, catalog, rng);
    if (value && detail::assign_value(work, *target, *value, catalog))
      detail::refresh_dependents(work, *target, catalog, immutable, rng);
  }

  result.status = ResampleStatus::kMaxIterations;
  result.report = evaluate_all(work, constraints);
  result.report.iterations = iterations;
  result.message = std::to_string(result.report.unsatisfied.size()) + " constraint(s) still violated after " +
                   std::to_string(max_iter) + " iterations";
  return result;
}

}  // namespace animgram
