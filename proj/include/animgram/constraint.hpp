#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "animgram/error.hpp"
#include "animgram/scene.hpp"
#include "animgram/vec3.hpp"

namespace animgram {

enum class ConstraintKind { kLessEq, kLess, kLargerEq, kLarger, kEq, kSameDir, kOppoDir, kSimilarDir };

constexpr std::string_view to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::kLessEq: return "less_eq";
    case ConstraintKind::kLess: return "less";
    case ConstraintKind::kLargerEq: return "larger_eq";
    case ConstraintKind::kLarger: return "larger";
    case ConstraintKind::kEq: return "eq";
    case ConstraintKind::kSameDir: return "same_dir";
    case ConstraintKind::kOppoDir: return "oppo_dir";
    case ConstraintKind::kSimilarDir: return "similar_dir";
  }
  return "?";
}

inline std::optional<ConstraintKind> constraint_kind_from_string(std::string_view s) {
  for (ConstraintKind k : {ConstraintKind::kLessEq, ConstraintKind::kLess, ConstraintKind::kLargerEq,
                           ConstraintKind::kLarger, ConstraintKind::kEq, ConstraintKind::kSameDir,
                           ConstraintKind::kOppoDir, ConstraintKind::kSimilarDir})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

constexpr bool is_order_kind(ConstraintKind k) {
  return k == ConstraintKind::kLessEq || k == ConstraintKind::kLess || k == ConstraintKind::kLargerEq ||
         k == ConstraintKind::kLarger;
}
constexpr bool is_direction_kind(ConstraintKind k) {
  return k == ConstraintKind::kSameDir || k == ConstraintKind::kOppoDir || k == ConstraintKind::kSimilarDir;
}

/// Tolerance on every angular comparison, radians.
inline constexpr double kAngleEpsilon = 1e-6;

/// Constant scalar, constant vector, or a feature inside the tree.
using OperandRef = std::variant<double, Vec3, FeaturePath>;

struct Constraint {
  ConstraintKind kind = ConstraintKind::kEq;
  std::vector<OperandRef> operands;
  std::vector<std::size_t> criteria;  // operand indices held fixed while resampling
  double theta_deg = 0.0;             // similar_dir only
  std::string origin;                 // which dynamic-model row produced it
  friend bool operator==(const Constraint&, const Constraint&) = default;

  bool is_criteria(std::size_t index) const {
    return std::find(criteria.begin(), criteria.end(), index) != criteria.end();
  }
};

struct ConstraintVerdict {
  bool satisfied = true;
  std::vector<std::size_t> violating;  // operand indices, ascending
  std::string error;                   // set when evaluation itself failed
};

struct ConstraintReport {
  std::vector<ConstraintVerdict> verdicts;
  std::vector<std::size_t> unsatisfied;  // constraint indices
  int iterations = 0;

  bool all_satisfied() const { return unsatisfied.empty(); }
};

/// Structural checks that do not need a tree: criteria indices in range,
/// one criteria operand for same_dir/oppo_dir, a usable theta.
inline void check_well_formed(const Constraint& c) {
  const std::string name(to_string(c.kind));
  if (c.operands.empty()) throw ConstraintError(name + ": no operands");
  for (std::size_t i : c.criteria)
    if (i >= c.operands.size()) throw ConstraintError(name + ": criteria index out of range");
  if ((c.kind == ConstraintKind::kSameDir || c.kind == ConstraintKind::kOppoDir) && c.criteria.size() != 1)
    throw ConstraintError(name + ": needs exactly one criteria operand");
  if (c.kind == ConstraintKind::kSimilarDir) {
    if (c.criteria.empty()) throw ConstraintError(name + ": needs at least one criteria operand");
    if (!(c.theta_deg >= 0.0 && c.theta_deg <= 180.0)) throw ConstraintError(name + ": theta out of range");
  }
}

/// Current value of an operand. Throws ConstraintError when a feature path
/// does not resolve.
inline FeatureValue resolve_operand(const ParseTree& tree, const OperandRef& op) {
  if (const double* d = std::get_if<double>(&op)) return *d;
  if (const Vec3* v = std::get_if<Vec3>(&op)) return *v;
  const auto& path = std::get<FeaturePath>(op);
  const Feature* f = tree.find(path);
  if (!f)
    throw ConstraintError("operand (" + std::to_string(path.node.value) + ", " + path.attribute + ", " +
                          path.feature + ") does not resolve");
  return f->value;
}

namespace detail {

inline bool values_equal(const FeatureValue& a, const FeatureValue& b) {
  if (a.index() != b.index()) throw ConstraintError("eq over operands of different domains");
  return a == b;
}

/// a REL b for the order kinds; componentwise for vectors.
inline bool ordered(ConstraintKind kind, const FeatureValue& a, const FeatureValue& b) {
  auto cmp = [kind](double x, double y) {
    switch (kind) {
      case ConstraintKind::kLessEq: return x <= y;
      case ConstraintKind::kLess: return x < y;
      case ConstraintKind::kLargerEq: return x >= y;
      case ConstraintKind::kLarger: return x > y;
      default: return false;
    }
  };
  if (a.index() != b.index()) throw ConstraintError("order constraint over operands of different domains");
  if (const double* x = std::get_if<double>(&a)) return cmp(*x, std::get<double>(b));
  if (const Vec3* u = std::get_if<Vec3>(&a)) {
    const Vec3& w = std::get<Vec3>(b);
    return cmp(u->x, w.x) && cmp(u->y, w.y) && cmp(u->z, w.z);
  }
  throw ConstraintError("order constraint over enum operands");
}

inline const Vec3& as_direction(const FeatureValue& v) {
  const Vec3* d = std::get_if<Vec3>(&v);
  if (!d) throw ConstraintError("direction constraint over a non-vector operand");
  if (!(norm(*d) > 0.0)) throw ConstraintError("direction constraint over a zero-length vector");
  return *d;
}

inline void mark(std::vector<std::size_t>& out, std::size_t i) {
  if (std::find(out.begin(), out.end(), i) == out.end()) out.push_back(i);
}

}  // namespace detail

/// Checks one constraint against the tree. Throws ConstraintError for an
/// unresolvable path, a zero-length direction, or mixed operand domains.
inline ConstraintVerdict evaluate(const ParseTree& tree, const Constraint& c) {
  check_well_formed(c);
  std::vector<FeatureValue> values;
  values.reserve(c.operands.size());
  for (const auto& op : c.operands) values.push_back(resolve_operand(tree, op));

  ConstraintVerdict verdict;
  auto& bad = verdict.violating;
  if (is_order_kind(c.kind)) {
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      if (!detail::ordered(c.kind, values[i], values[i + 1])) {
        detail::mark(bad, i);
        detail::mark(bad, i + 1);
      }
    }
  } else if (c.kind == ConstraintKind::kEq) {
    const std::size_t ref = c.criteria.empty() ? 0 : c.criteria.front();
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!detail::values_equal(values[ref], values[i])) {
        detail::mark(bad, ref);
        detail::mark(bad, i);
      }
    }
  } else {
    for (const auto& v : values) detail::as_direction(v);
    const double limit = c.kind == ConstraintKind::kSimilarDir ? deg_to_rad(c.theta_deg) : 0.0;
    for (std::size_t j : c.criteria) {
      const Vec3& axis = std::get<Vec3>(values[j]);
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (i == j) continue;
        // similar_dir: criteria-criteria pairs are a feasibility condition
        // and are reported the same way.
        const double a = angle_between(std::get<Vec3>(values[i]), axis);
        bool ok = true;
        switch (c.kind) {
          case ConstraintKind::kSameDir: ok = a <= kAngleEpsilon; break;
          case ConstraintKind::kOppoDir: ok = a >= kPi - kAngleEpsilon; break;
          default: ok = a <= limit + kAngleEpsilon; break;
        }
        if (!ok) {
          detail::mark(bad, i);
          if (c.is_criteria(i)) detail::mark(bad, j);
        }
      }
    }
  }
  std::sort(bad.begin(), bad.end());
  verdict.satisfied = bad.empty();
  return verdict;
}

/// Evaluates every constraint; evaluation failures count as unsatisfied
/// and carry their message.
inline ConstraintReport evaluate_all(const ParseTree& tree, const std::vector<Constraint>& constraints) {
  ConstraintReport report;
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    ConstraintVerdict v;
    try {
      v = evaluate(tree, constraints[i]);
    } catch (const ConstraintError& e) {
      v.satisfied = false;
      v.error = e.what();
    }
    if (!v.satisfied) report.unsatisfied.push_back(i);
    report.verdicts.push_back(std::move(v));
  }
  return report;
}

}  // namespace animgram
