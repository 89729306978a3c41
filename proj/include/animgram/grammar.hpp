#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "animgram/error.hpp"
#include "animgram/rng.hpp"
#include "animgram/scene.hpp"

namespace animgram {

/// Bounds on the randomly chosen object counts.
struct GrammarLimits {
  int targets_min = 1;
  int targets_max = 3;
  int collisions_min = 0;
  int collisions_max = 2;
  friend bool operator==(const GrammarLimits&, const GrammarLimits&) = default;

  bool valid() const {
    return targets_min >= 1 && targets_min <= targets_max && collisions_min >= 0 &&
           collisions_min <= collisions_max;
  }
};

/// Attribute names carried by each node kind, in sampling order. Kinds that
/// only group other nodes carry none.
inline std::vector<std::string_view> node_attribute_schema(NodeKind kind) {
  switch (kind) {
    case NodeKind::kEnvironment:
      return {names::kBoundaryCondition, names::kExternalForce, names::kTemporal};
    case NodeKind::kRender:
      return {names::kBackground, names::kCamera};
    case NodeKind::kTargetObject:
    case NodeKind::kCollisionObject:
      return {names::kAppearance, names::kShape, names::kMotion, names::kPhysics};
    default:
      return {};
  }
}

namespace detail {

inline SceneNode make_node(std::uint32_t id, NodeKind kind) {
  SceneNode n;
  n.id = NodeId{id};
  n.kind = kind;
  for (std::string_view a : node_attribute_schema(kind)) n.attributes.push_back({std::string(a), {}});
  return n;
}

}  // namespace detail

/// Builds the flattened tree for fixed object counts. Ids follow preorder:
///
///   Scene -> TargetObjectSet -> TargetObject*  (1 .. targets)
///         -> Environment -> CollisionObjectSet -> CollisionObject*
///                        -> Render
inline ParseTree build_scene_tree(int targets, int collisions, std::uint64_t seed = 0) {
  if (targets < 1 || collisions < 0) throw Error("build_scene_tree: need >= 1 target and >= 0 collisions");
  ParseTree tree;
  tree.seed = seed;
  std::uint32_t next = 0;
  auto add = [&](NodeKind kind) {
    tree.nodes.push_back(detail::make_node(next, kind));
    return NodeId{next++};
  };
  const NodeId scene = add(NodeKind::kScene);
  const NodeId target_set = add(NodeKind::kTargetObjectSet);
  for (int i = 0; i < targets; ++i) {
    const NodeId child = add(NodeKind::kTargetObject);
    tree.node(target_set).children.push_back(child);
  }
  const NodeId env = add(NodeKind::kEnvironment);
  const NodeId collision_set = add(NodeKind::kCollisionObjectSet);
  for (int i = 0; i < collisions; ++i) {
    const NodeId child = add(NodeKind::kCollisionObject);
    tree.node(collision_set).children.push_back(child);
  }
  const NodeId render = add(NodeKind::kRender);
  tree.node(scene).children = {target_set, env};
  tree.node(env).children = {collision_set, render};
  tree.root = scene;
  return tree;
}

/// Samples a scene parse tree: object counts uniform within `limits`,
/// mandatory components always present.
inline ParseTree expand_scene(Rng& rng, const GrammarLimits& limits, std::uint64_t seed = 0) {
  if (!limits.valid()) throw Error("expand_scene: invalid grammar limits");
  const int targets = static_cast<int>(rng.between(limits.targets_min, limits.targets_max));
  const int collisions = static_cast<int>(rng.between(limits.collisions_min, limits.collisions_max));
  return build_scene_tree(targets, collisions, seed);
}

/// Checks a tree against the production rules and returns every violation
/// found (empty when the tree is well formed). Independent of how the tree
/// was built.
inline std::vector<std::string> validate_structure(const ParseTree& tree) {
  std::vector<std::string> problems;
  auto fail = [&](std::string msg) { problems.push_back(std::move(msg)); };
  const auto n = tree.nodes.size();
  for (std::size_t i = 0; i < n; ++i)
    if (tree.nodes[i].id.value != i) fail("node " + std::to_string(i) + " has mismatched id");
  if (!problems.empty()) return problems;

  std::vector<int> parents(n, 0);
  for (const auto& node : tree.nodes) {
    for (NodeId c : node.children) {
      if (c.value >= n) {
        fail("node " + std::to_string(node.id.value) + " has dangling child");
        continue;
      }
      ++parents[c.value];
    }
  }
  if (!problems.empty()) return problems;
  if (n == 0 || tree.root.value >= n) {
    fail("missing root");
    return problems;
  }
  int scenes = 0;
  for (const auto& node : tree.nodes) {
    if (node.kind == NodeKind::kScene) ++scenes;
    const int expected_parents = node.id == tree.root ? 0 : 1;
    if (parents[node.id.value] != expected_parents)
      fail("node " + std::to_string(node.id.value) + " has " + std::to_string(parents[node.id.value]) +
           " parents");
  }
  if (scenes != 1) fail("expected exactly one Scene node");

  auto kind_of = [&](NodeId id) { return tree.node(id).kind; };
  auto expect_children = [&](const SceneNode& node, std::vector<NodeKind> kinds) {
    if (node.children.size() != kinds.size()) {
      fail(std::string(to_string(node.kind)) + " must have " + std::to_string(kinds.size()) + " children");
      return;
    }
    for (std::size_t i = 0; i < kinds.size(); ++i)
      if (kind_of(node.children[i]) != kinds[i])
        fail(std::string(to_string(node.kind)) + " child " + std::to_string(i) + " must be " +
             std::string(to_string(kinds[i])));
  };
  auto expect_all = [&](const SceneNode& node, NodeKind kind, std::size_t at_least) {
    if (node.children.size() < at_least)
      fail(std::string(to_string(node.kind)) + " needs at least " + std::to_string(at_least) + " children");
    for (NodeId c : node.children)
      if (kind_of(c) != kind)
        fail(std::string(to_string(node.kind)) + " may only contain " + std::string(to_string(kind)));
  };

  if (tree.node(tree.root).kind != NodeKind::kScene) fail("root is not a Scene node");
  for (const auto& node : tree.nodes) {
    switch (node.kind) {
      case NodeKind::kScene:
        expect_children(node, {NodeKind::kTargetObjectSet, NodeKind::kEnvironment});
        break;
      case NodeKind::kEnvironment:
        expect_children(node, {NodeKind::kCollisionObjectSet, NodeKind::kRender});
        break;
      case NodeKind::kTargetObjectSet:
        expect_all(node, NodeKind::kTargetObject, 1);
        break;
      case NodeKind::kCollisionObjectSet:
        expect_all(node, NodeKind::kCollisionObject, 0);
        break;
      default:
        if (!node.children.empty()) fail(std::string(to_string(node.kind)) + " must be a leaf");
    }
    const auto schema = node_attribute_schema(node.kind);
    bool schema_ok = node.attributes.size() == schema.size();
    for (std::size_t i = 0; schema_ok && i < schema.size(); ++i) schema_ok = node.attributes[i].name == schema[i];
    if (!schema_ok)
      fail("node " + std::to_string(node.id.value) + " attributes do not match the " +
           std::string(to_string(node.kind)) + " schema");
  }
  if (tree.targets().empty()) fail("tree has no TargetObject");
  return problems;
}

}  // namespace animgram
