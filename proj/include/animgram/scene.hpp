#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "animgram/vec3.hpp"

namespace animgram {

/// Index of a node inside its ParseTree.
struct NodeId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(const NodeId&, const NodeId&) = default;
};

enum class NodeKind {
  kScene,
  kTargetObjectSet,
  kCollisionObjectSet,
  kEnvironment,
  kRender,
  kTargetObject,
  kCollisionObject,
};

constexpr std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::kScene: return "Scene";
    case NodeKind::kTargetObjectSet: return "TargetObjectSet";
    case NodeKind::kCollisionObjectSet: return "CollisionObjectSet";
    case NodeKind::kEnvironment: return "Environment";
    case NodeKind::kRender: return "Render";
    case NodeKind::kTargetObject: return "TargetObject";
    case NodeKind::kCollisionObject: return "CollisionObject";
  }
  return "?";
}

inline std::optional<NodeKind> node_kind_from_string(std::string_view s) {
  for (NodeKind k : {NodeKind::kScene, NodeKind::kTargetObjectSet, NodeKind::kCollisionObjectSet,
                     NodeKind::kEnvironment, NodeKind::kRender, NodeKind::kTargetObject,
                     NodeKind::kCollisionObject}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

constexpr bool is_object(NodeKind kind) {
  return kind == NodeKind::kTargetObject || kind == NodeKind::kCollisionObject;
}

/// Scalar quantity, 3-vector (direction or position), or enum token.
using FeatureValue = std::variant<double, Vec3, std::string>;

/// Atomic semantic unit: a qualitative label paired with a quantitative value.
struct Feature {
  std::string name;
  std::string label;
  FeatureValue value;
  std::string unit;
  friend bool operator==(const Feature&, const Feature&) = default;
};

struct Attribute {
  std::string name;
  std::vector<Feature> features;
  friend bool operator==(const Attribute&, const Attribute&) = default;

  const Feature* find(std::string_view feature) const {
    for (const auto& f : features)
      if (f.name == feature) return &f;
    return nullptr;
  }
  Feature* find(std::string_view feature) {
    for (auto& f : features)
      if (f.name == feature) return &f;
    return nullptr;
  }
};

struct SceneNode {
  NodeId id;
  NodeKind kind = NodeKind::kScene;
  std::vector<Attribute> attributes;
  std::vector<NodeId> children;
  friend bool operator==(const SceneNode&, const SceneNode&) = default;

  const Attribute* attribute(std::string_view name) const {
    for (const auto& a : attributes)
      if (a.name == name) return &a;
    return nullptr;
  }
  Attribute* attribute(std::string_view name) {
    for (auto& a : attributes)
      if (a.name == name) return &a;
    return nullptr;
  }
  const Feature* feature(std::string_view attr, std::string_view name) const {
    const Attribute* a = attribute(attr);
    return a ? a->find(name) : nullptr;
  }
  Feature* feature(std::string_view attr, std::string_view name) {
    Attribute* a = attribute(attr);
    return a ? a->find(name) : nullptr;
  }
};

/// Address of one feature inside a tree.
struct FeaturePath {
  NodeId node;
  std::string attribute;
  std::string feature;
  friend auto operator<=>(const FeaturePath&, const FeaturePath&) = default;
};

/// One sampled derivation of the scene grammar. Nodes are stored by id
/// (`nodes[i].id.value == i`); the root is always node 0.
struct ParseTree {
  std::vector<SceneNode> nodes;
  NodeId root;
  std::uint64_t seed = 0;
  friend bool operator==(const ParseTree&, const ParseTree&) = default;

  const SceneNode& node(NodeId id) const { return nodes.at(id.value); }
  SceneNode& node(NodeId id) { return nodes.at(id.value); }

  const Feature* find(const FeaturePath& p) const {
    if (p.node.value >= nodes.size()) return nullptr;
    return nodes[p.node.value].feature(p.attribute, p.feature);
  }
  Feature* find(const FeaturePath& p) {
    if (p.node.value >= nodes.size()) return nullptr;
    return nodes[p.node.value].feature(p.attribute, p.feature);
  }

  std::vector<NodeId> ids_of(NodeKind kind) const {
    std::vector<NodeId> out;
    for (const auto& n : nodes)
      if (n.kind == kind) out.push_back(n.id);
    return out;
  }
  std::vector<NodeId> targets() const { return ids_of(NodeKind::kTargetObject); }
  std::vector<NodeId> collisions() const { return ids_of(NodeKind::kCollisionObject); }
  std::vector<NodeId> objects() const {
    std::vector<NodeId> out;
    for (const auto& n : nodes)
      if (is_object(n.kind)) out.push_back(n.id);
    return out;
  }
  NodeId first_of(NodeKind kind) const {
    for (const auto& n : nodes)
      if (n.kind == kind) return n.id;
    return root;
  }
};

// Attribute and feature names used throughout the engine. They match the
// names in the catalog data file.
namespace names {
inline constexpr std::string_view kAppearance = "Appearance";
inline constexpr std::string_view kShape = "Shape";
inline constexpr std::string_view kMotion = "Motion";
inline constexpr std::string_view kPhysics = "Physics";
inline constexpr std::string_view kBoundaryCondition = "Boundary Condition";
inline constexpr std::string_view kExternalForce = "External Force";
inline constexpr std::string_view kTemporal = "Temporal";
inline constexpr std::string_view kBackground = "Background";
inline constexpr std::string_view kCamera = "Camera";

inline constexpr std::string_view kShapeFeature = "Shape";
inline constexpr std::string_view kSize = "Size";
inline constexpr std::string_view kVelocityValue = "Velocity value";
inline constexpr std::string_view kVelocityDirection = "Velocity direction";
inline constexpr std::string_view kInitialPosition = "Initial position";
inline constexpr std::string_view kMaterial = "Material";
inline constexpr std::string_view kYoungsModulus = "Young's Modulus";
inline constexpr std::string_view kPoissonRatio = "Poisson Ratio";
}  // namespace names

inline FeaturePath velocity_value_path(NodeId n) {
  return {n, std::string(names::kMotion), std::string(names::kVelocityValue)};
}
inline FeaturePath velocity_direction_path(NodeId n) {
  return {n, std::string(names::kMotion), std::string(names::kVelocityDirection)};
}
inline FeaturePath position_path(NodeId n) {
  return {n, std::string(names::kMotion), std::string(names::kInitialPosition)};
}

}  // namespace animgram
